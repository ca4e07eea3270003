"""PPO baselines with text fusion, driven over the dynagrid wire protocol."""

from .agent import ARCHITECTURES, TEXT_MODES, ActorCritic
from .client import StdioEnvClient, TcpEnvClient, VecEnv, WireObservation
from .configs import TrainConfig
from .fusion import AttentionFusion, FilmModulation, HybridFusion, concat_fusion
from .ppo import NaNLossError, evaluate_remote, load_checkpoint, train

__version__ = "0.1.0"
