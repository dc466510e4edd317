from dataclasses import dataclass

from hypnav.errors import ConfigError


@dataclass
class CuriosityConfig:
    """
    Curiosity section of the experiment file

    eta scales the intrinsic reward, beta mixes forward and inverse losses
    and lam weights the curiosity loss against the TD loss. input_scale
    shrinks raw states before the exponential map. The inverse term is ramped
    in linearly over the first inverse_warmup updates.
    """
    embed_dim: int = 2
    hidden: int = 64
    eta: float = 0.1
    beta: float = 0.2
    lam: float = 0.1
    input_scale: float = 0.1
    inverse_warmup: int = 1000
    enabled: bool = True

    def validate(self):
        if self.embed_dim < 2:
            raise ConfigError("curiosity.embed_dim must be >= 2")
        if not 0.0 <= self.beta <= 1.0:
            raise ConfigError("curiosity.beta must lie in [0, 1], got {0}".format(self.beta))
        if self.eta < 0 or self.lam < 0:
            raise ConfigError("curiosity.eta and curiosity.lam must be >= 0")
        if self.input_scale <= 0:
            raise ConfigError("curiosity.input_scale must be positive")
        if self.inverse_warmup < 0:
            raise ConfigError("curiosity.inverse_warmup must be >= 0")
        return self
