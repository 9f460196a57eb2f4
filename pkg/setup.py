"""Setup configuration for backward compatibility."""

from setuptools import setup

setup()
