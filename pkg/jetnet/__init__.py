from jetnet.checkpoint import config_hash, load_checkpoint, save_checkpoint
from jetnet.features import FourierFeatureMap, embed
from jetnet.jets import Jet, JetOrderSpec
from jetnet.networks import JetNetwork, NetworkConfig, modified_mlp_forward

__all__ = [
    "FourierFeatureMap",
    "Jet",
    "JetNetwork",
    "JetOrderSpec",
    "NetworkConfig",
    "config_hash",
    "embed",
    "load_checkpoint",
    "modified_mlp_forward",
    "save_checkpoint",
]
