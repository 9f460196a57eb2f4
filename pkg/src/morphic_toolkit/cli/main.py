"""
Command-line interface for the morphic toolkit.
"""

import functools
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, TypeVar, cast

import click
import yaml
from pydantic import ValidationError

from morphic_toolkit import __version__
from morphic_toolkit.analysis.bounds import (
    bound_set,
    lambda_count_bound,
    periodicity_bound_expression,
    return_substitution_count_bound,
)
from morphic_toolkit.core.base import (
    BoundMode,
    BudgetExceededError,
    DomainError,
    InvariantViolation,
    OutputFormat,
    Word,
)
from morphic_toolkit.core.config import (
    DEFAULT_SETTINGS,
    ToolkitSettings,
    describe_validation_error,
)
from morphic_toolkit.core.stream import FixedPointStream
from morphic_toolkit.core.words import Morphism
from morphic_toolkit.decision.certificate import Certificate, labels_text
from morphic_toolkit.decision.equivalence import d0l_equivalence, hd0l_equivalence
from morphic_toolkit.decision.normalization import normalize_morphic
from morphic_toolkit.decision.periodicity import hd0l_periodicity
from morphic_toolkit.decision.replay import verify_certificate
from morphic_toolkit.decision.rigidity import common_power_check
from morphic_toolkit.returns.structure import (
    ReturnStructure,
    build_return_structure,
    derivation_tower,
)
from morphic_toolkit.returns.substitution import lambda_morphism, return_substitution
from morphic_toolkit.utils.text_format import format_morphism, load_morphisms

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])

EXIT_DOMAIN_ERROR = 1
EXIT_BUDGET_EXCEEDED = 2
EXIT_INTERNAL_ERROR = 3
EXIT_USAGE_ERROR = 64


def handle_errors(func: F) -> F:
    """Map toolkit exceptions onto exit codes with a one-line diagnostic on stderr."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except DomainError as e:
            click.echo(f"✗ Error: {e}", err=True)
            sys.exit(EXIT_DOMAIN_ERROR)
        except ValidationError as e:
            click.echo(f"✗ Error: {describe_validation_error(e)}", err=True)
            sys.exit(EXIT_DOMAIN_ERROR)
        except BudgetExceededError as e:
            click.echo(f"✗ Error: {e}", err=True)
            sys.exit(EXIT_BUDGET_EXCEEDED)
        except InvariantViolation as e:
            click.echo(f"✗ Internal error: {e}", err=True)
            sys.exit(EXIT_INTERNAL_ERROR)

    return cast(F, wrapper)


def load_morphism(reference: str) -> Morphism:
    """
    Load a morphism from ``path`` or ``path:name``.

    A bare path must hold exactly one morphism.
    """
    path, name = reference, ""
    if not Path(reference).exists() and ":" in reference:
        path, name = reference.rsplit(":", 1)
    if not Path(path).exists():
        raise DomainError(f"Morphism file {path} does not exist")
    morphisms = load_morphisms(path)
    if name:
        for m in morphisms:
            if m.name == name:
                return m
        raise DomainError(f"No morphism named {name} in {path}")
    if len(morphisms) != 1:
        raise DomainError(
            f"{path} holds {len(morphisms)} morphisms; select one with {path}:<name>"
        )
    return morphisms[0]


def _optional_morphism(reference: Optional[str]) -> Optional[Morphism]:
    return load_morphism(reference) if reference else None


def _settings(ctx: click.Context) -> ToolkitSettings:
    return cast(ToolkitSettings, ctx.obj["SETTINGS"])


def emit(ctx: click.Context, document: Dict[str, Any]) -> None:
    """Write a document to stdout in the selected format."""
    if ctx.obj["FORMAT"] == OutputFormat.JSON:
        click.echo(json.dumps(document, indent=2, ensure_ascii=False))
    else:
        text = yaml.safe_dump(document, sort_keys=False, allow_unicode=True, width=100)
        click.echo(text, nl=False)


def emit_certificate(ctx: click.Context, cert: Certificate, output: Optional[str]) -> None:
    if output:
        cert.save(output)
        logger.info(f"Certificate written to {output}")
    if ctx.obj["FORMAT"] == OutputFormat.JSON:
        click.echo(cert.to_json())
    else:
        click.echo(cert.to_text(), nl=False)


def replay_file(path: str, settings: Optional[ToolkitSettings]) -> Dict[str, Any]:
    cert = Certificate.load(path)
    return verify_certificate(cert, settings).to_dict()


def _structure_document(rs: ReturnStructure, length: int) -> Dict[str, Any]:
    derived = rs.derived.prefix(length)
    document: Dict[str, Any] = {
        "prefix": rs.base.alphabet.render(rs.prefix_u),
        "return_words": rs.labels(),
        "theta": format_morphism(rs.theta),
        "derived_prefix": rs.derived_alphabet.render(derived),
    }
    if rs.substitution is not None:
        document["return_substitution"] = format_morphism(rs.substitution)
    return document


def _prefix(x: FixedPointStream, length: int) -> Word:
    if length < 1:
        raise DomainError("Prefix length must be at least 1")
    return x.prefix(length)


seed_option = click.option("--seed", "-a", required=True, help="Seed letter of the fixed point")
morphism_option = click.option(
    "--morphism",
    "-m",
    required=True,
    help="Substitution σ as a file path, or path:name for a file with several morphisms",
)
coding_option = click.option("--coding", "-c", "coding", help="Morphism φ applied to σ^ω(a)")
output_option = click.option(
    "--output", "-o", type=click.Path(dir_okay=False), help="Also write the certificate here"
)


class MorphicGroup(click.Group):
    """Command group whose usage errors exit with EXIT_USAGE_ERROR."""

    def make_context(
        self,
        info_name: Optional[str],
        args: List[str],
        parent: Optional[click.Context] = None,
        **extra: Any,
    ) -> click.Context:
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE_ERROR
            raise

    def invoke(self, ctx: click.Context) -> Any:
        # subcommand contexts are built here, so their usage errors surface here too
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE_ERROR
            raise


@click.group(cls=MorphicGroup, invoke_without_command=True)
@click.version_option(version=__version__)
@click.option(
    "--config", type=click.Path(exists=True, dir_okay=False), help="Settings file (YAML)"
)
@click.option(
    "--format",
    "output_format",
    type=click.Choice([f.value for f in OutputFormat]),
    default=OutputFormat.TEXT.value,
    help="Output format",
)
@click.option(
    "--bound-mode",
    type=click.Choice([m.value for m in BoundMode]),
    help="Certificate constants or empirical practical constants",
)
@click.option("--budget", type=int, help="Materialized symbols allowed per stream")
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="WARNING",
    help="Logging level (logs go to stderr)",
)
@click.option(
    "--replay",
    "replay_path",
    type=click.Path(exists=True, dir_okay=False),
    help="Re-verify a certificate and exit",
)
@click.pass_context
@handle_errors
def cli(
    ctx: click.Context,
    config: Optional[str],
    output_format: str,
    bound_mode: Optional[str],
    budget: Optional[int],
    log_level: str,
    replay_path: Optional[str],
) -> None:
    """
    morphic - return words, derived sequences and decision procedures
    for fixed points of primitive substitutions and their morphic images.
    """
    logging.basicConfig(
        level=getattr(logging, log_level.upper()),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    ctx.ensure_object(dict)
    settings = ToolkitSettings.from_yaml(config) if config else DEFAULT_SETTINGS
    ctx.obj["SETTINGS"] = settings.with_overrides(
        bound_mode=BoundMode(bound_mode) if bound_mode else None, memory_budget=budget
    )
    ctx.obj["FORMAT"] = OutputFormat(output_format)
    ctx.obj["OVERRIDDEN"] = bool(config or bound_mode or budget)

    if replay_path:
        emit(ctx, replay_file(replay_path, _replay_settings(ctx)))
        ctx.exit(0)
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


def _replay_settings(ctx: click.Context) -> Optional[ToolkitSettings]:
    return _settings(ctx) if ctx.obj["OVERRIDDEN"] else None


@cli.command()
@morphism_option
@seed_option
@click.option(
    "--prefix-length",
    "--prefix-letter-count",
    "prefix_length",
    type=int,
    default=1,
    show_default=True,
    help="Length of the prefix u",
)
@click.option("--length", "-n", type=int, default=30, show_default=True, help="Symbols shown")
@click.option(
    "--levels",
    type=int,
    help="Show the iterated derivations on the first letter instead of a single prefix",
)
@click.pass_context
@handle_errors
def derive(
    ctx: click.Context,
    morphism: str,
    seed: str,
    prefix_length: int,
    length: int,
    levels: Optional[int],
) -> None:
    """
    Return words and derived sequence of σ^ω(a) on a prefix.
    """
    sigma = load_morphism(morphism)
    x = FixedPointStream(sigma, seed, _settings(ctx).memory_budget)
    document: Dict[str, Any] = {"sequence": x.alphabet.render(x.prefix(length))}
    if levels:
        document["levels"] = [
            {"level": i, **_structure_document(rs, length)}
            for i, rs in enumerate(derivation_tower(x, levels), start=1)
        ]
    else:
        rs = build_return_structure(x, _prefix(x, prefix_length))
        document.update(_structure_document(rs, length))
    emit(ctx, document)


@cli.command("return-sub")
@morphism_option
@seed_option
@click.option("--prefix-length", type=int, default=1, show_default=True, help="Length of u")
@click.pass_context
@handle_errors
def return_sub(ctx: click.Context, morphism: str, seed: str, prefix_length: int) -> None:
    """
    Return substitution σ_u with Θσ_u = σΘ verified.
    """
    sigma = load_morphism(morphism)
    x = FixedPointStream(sigma, seed, _settings(ctx).memory_budget)
    result = return_substitution(sigma, x, _prefix(x, prefix_length))
    emit(
        ctx,
        {
            "prefix": x.alphabet.render(x.prefix(prefix_length)),
            "return_substitution": format_morphism(result.inner),
            "theta": format_morphism(result.theta),
            "commutation": "verified",
        },
    )


@cli.command("lambda")
@morphism_option
@seed_option
@click.option("--coding", "-c", "coding", required=True, help="Coding φ applied to σ^ω(a)")
@click.option("--prefix-length", type=int, default=1, show_default=True, help="Length of u")
@click.option("--length", "-n", type=int, default=30, show_default=True, help="Symbols shown")
@click.pass_context
@handle_errors
def lambda_(
    ctx: click.Context, morphism: str, seed: str, coding: str, prefix_length: int, length: int
) -> None:
    """
    λ morphism of a coding: φΘ_{x,u} = Θ_{φ(x),φ(u)}λ.
    """
    sigma = load_morphism(morphism)
    phi = load_morphism(coding)
    x = FixedPointStream(sigma, seed, _settings(ctx).memory_budget)
    rs = build_return_structure(x, _prefix(x, prefix_length))
    result = lambda_morphism(rs, phi)
    image = result.image_rs
    emit(
        ctx,
        {
            "prefix": x.alphabet.render(rs.prefix_u),
            "coded_prefix": image.base.alphabet.render(image.prefix_u),
            "lambda": format_morphism(result.lambda_),
            "coded_return_words": image.labels(),
            "coded_theta": format_morphism(image.theta),
            "coded_derived_prefix": image.derived_alphabet.render(image.derived.prefix(length)),
        },
    )


@cli.command()
@morphism_option
@click.option("--seed", "-a", help="Letter to sample from in practical mode")
@click.pass_context
@handle_errors
def bounds(ctx: click.Context, morphism: str, seed: Optional[str]) -> None:
    """
    Constants R, Q, K of a primitive substitution and the derived level bounds.
    """
    settings = _settings(ctx)
    sigma = load_morphism(morphism)
    bs = bound_set(sigma, settings.bound_mode, settings, seed)
    emit(
        ctx,
        {
            "bound_set": bs.to_dict(),
            "return_substitutions": return_substitution_count_bound(bs).to_dict(),
            "return_substitutions_literal": return_substitution_count_bound(
                bs, literal=True
            ).to_dict(),
            "lambda_morphisms": lambda_count_bound(bs).to_dict(),
            "periodicity_levels": periodicity_bound_expression(bs).to_dict(),
        },
    )


@cli.command("d0l-eq")
@click.option("--sigma", required=True, help="First substitution (path or path:name)")
@click.option("--seed-a", "-a", "seed_a", required=True, help="Seed of the first fixed point")
@click.option("--tau", required=True, help="Second substitution (path or path:name)")
@click.option("--seed-b", "-b", "seed_b", required=True, help="Seed of the second fixed point")
@output_option
@click.pass_context
@handle_errors
def d0l_eq(
    ctx: click.Context, sigma: str, seed_a: str, tau: str, seed_b: str, output: Optional[str]
) -> None:
    """
    Decide σ^ω(a) = τ^ω(b).

    Levels follow level_schedule from the settings. The default, derivation,
    takes each prefix from the return structure of the level below. The
    geometric schedules use prefixes of length (K+1)^n instead: geometric with
    K = max(K_σ, K_τ), geometric-literal with K = K_σ on both sides.
    """
    cert = d0l_equivalence(
        load_morphism(sigma), seed_a, load_morphism(tau), seed_b, _settings(ctx)
    )
    emit_certificate(ctx, cert, output)


@cli.command("hd0l-eq")
@click.option("--sigma", required=True, help="First substitution (path or path:name)")
@click.option("--seed-a", "-a", "seed_a", required=True, help="Seed of the first fixed point")
@click.option("--phi", help="Morphism applied to σ^ω(a)")
@click.option("--tau", required=True, help="Second substitution (path or path:name)")
@click.option("--seed-b", "-b", "seed_b", required=True, help="Seed of the second fixed point")
@click.option("--psi", help="Morphism applied to τ^ω(b)")
@output_option
@click.pass_context
@handle_errors
def hd0l_eq(
    ctx: click.Context,
    sigma: str,
    seed_a: str,
    phi: Optional[str],
    tau: str,
    seed_b: str,
    psi: Optional[str],
    output: Optional[str],
) -> None:
    """
    Decide φ(σ^ω(a)) = ψ(τ^ω(b)).

    Morphisms that are not letter-to-letter are normalized first. Levels follow
    level_schedule from the settings. The default, derivation, takes each prefix
    from the return structure of the level below. The geometric schedules use
    prefixes of length (K+1)^n instead: geometric with K = max(K_σ, K_τ),
    geometric-literal with K = K_σ on both sides.
    """
    cert = hd0l_equivalence(
        load_morphism(sigma),
        seed_a,
        _optional_morphism(phi),
        load_morphism(tau),
        seed_b,
        _optional_morphism(psi),
        _settings(ctx),
    )
    emit_certificate(ctx, cert, output)


@cli.command()
@morphism_option
@seed_option
@coding_option
@output_option
@click.pass_context
@handle_errors
def periodicity(
    ctx: click.Context, morphism: str, seed: str, coding: Optional[str], output: Optional[str]
) -> None:
    """
    Decide whether φ(σ^ω(a)) is periodic.
    """
    cert = hd0l_periodicity(
        load_morphism(morphism), seed, _optional_morphism(coding), _settings(ctx)
    )
    emit_certificate(ctx, cert, output)


@cli.command("common-power")
@click.option("--sigma", required=True, help="First substitution (path or path:name)")
@click.option("--tau", required=True, help="Second substitution (path or path:name)")
@seed_option
@click.option("--max-prefix-levels", type=int, help="Derivation levels searched")
@click.option("--max-exponent", type=int, help="Largest exponent tried on either side")
@output_option
@click.pass_context
@handle_errors
def common_power(
    ctx: click.Context,
    sigma: str,
    tau: str,
    seed: str,
    max_prefix_levels: Optional[int],
    max_exponent: Optional[int],
    output: Optional[str],
) -> None:
    """
    Search for i, j with σ^i = τ^j when σ and τ share a fixed point.
    """
    cert = common_power_check(
        load_morphism(sigma),
        load_morphism(tau),
        seed,
        _settings(ctx),
        max_prefix_levels,
        max_exponent,
    )
    emit_certificate(ctx, cert, output)


@cli.command()
@morphism_option
@seed_option
@click.option("--coding", "-c", "coding", required=True, help="Morphism ρ applied to σ^ω(a)")
@click.option("--length", "-n", type=int, default=30, show_default=True, help="Symbols shown")
@click.pass_context
@handle_errors
def normalize(ctx: click.Context, morphism: str, seed: str, coding: str, length: int) -> None:
    """
    Rewrite ρ(σ^ω(a)) as χ(τ^ω(seed)) with χ a coding and τ primitive.
    """
    result = normalize_morphic(load_morphism(morphism), seed, load_morphism(coding))
    sequence = result.sequence(_settings(ctx).memory_budget)
    document = result.to_dict()
    document["sequence"] = labels_text(sequence.labels(length))
    emit(ctx, document)


@cli.command()
@click.argument("certificate", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
@handle_errors
def replay(ctx: click.Context, certificate: str) -> None:
    """
    Re-run a certificate and check its witness.
    """
    emit(ctx, replay_file(certificate, _replay_settings(ctx)))


if __name__ == "__main__":
    cli()
