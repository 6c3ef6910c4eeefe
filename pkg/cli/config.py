from pathlib import Path

from pydantic import BaseModel, Field

from hdc.core import default_tau, parse_seed
from settings import Settings


class CliConfig(BaseModel):
    """Effective configuration of one invocation: flags > environment > defaults."""

    dimension: int = Field(ge=2)
    seed: int
    n: int = Field(ge=2)
    tau: float | None = None
    model_path: Path
    workers: int = Field(ge=1)
    json_output: bool = False
    strict: bool = False
    verbose: bool = False

    @classmethod
    def resolve(
        cls,
        base: Settings,
        *,
        dimension: int | None = None,
        seed: str | None = None,
        tau: float | None = None,
        json_output: bool = False,
        strict: bool = False,
        verbose: bool = False,
    ) -> "CliConfig":
        return cls(
            dimension=dimension if dimension is not None else base.DIMENSION,
            seed=parse_seed(seed) if seed is not None else base.SEED,
            n=base.N,
            tau=tau if tau is not None else base.TAU,
            model_path=base.MODEL_PATH,
            workers=base.WORKERS,
            json_output=json_output,
            strict=strict,
            verbose=verbose,
        )

    def tau_for(self, dimension: int) -> float:
        """Explicit threshold, else 4/sqrt(D) of the artifact being queried."""
        return self.tau if self.tau is not None else default_tau(dimension)
