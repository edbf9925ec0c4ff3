from .files import atomic_write_bytes, atomic_write_text, read_bytes, read_json, write_json
from .frames import FrameStore, decode_png, encode_png, frame_filename, save_frames

__all__ = [
    "FrameStore",
    "atomic_write_bytes",
    "atomic_write_text",
    "decode_png",
    "encode_png",
    "frame_filename",
    "read_bytes",
    "read_json",
    "save_frames",
    "write_json",
]
