"""Hierarchical motion-compensated light field codec with block random access."""

from .container import (BadMagic, BadVersion, ContainerError, EncodeParams,
                        Truncated, encode_light_field, parse)
from .decoder import (DecodeError, decode_block, decode_full, decode_view,
                      open_stream)
from .lightfield import ColorConfig, LightField, psnr
from .renderer import Camera, LfGeometry, pose_camera, render

__all__ = [
    "BadMagic", "BadVersion", "Camera", "ColorConfig", "ContainerError",
    "DecodeError", "EncodeParams", "LfGeometry", "LightField", "Truncated",
    "decode_block", "decode_full", "decode_view", "encode_light_field",
    "open_stream", "parse", "pose_camera", "psnr", "render",
]

__version__ = "0.1.0"
