"""Photomosaic tile assignment engine."""

from ._core import (
    ClusterModel,
    MosaicError,
    TileDatabase,
    cluster,
    ingest,
    load_image,
    mann_whitney_u,
    render,
    save_image,
    solve,
    synthetic_database,
    synthetic_scene,
)

__all__ = [
    "ClusterModel",
    "MosaicError",
    "TileDatabase",
    "cluster",
    "ingest",
    "load_image",
    "mann_whitney_u",
    "render",
    "save_image",
    "solve",
    "synthetic_database",
    "synthetic_scene",
]
