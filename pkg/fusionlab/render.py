"""
Draw expanded patches as SVG with svgwrite.

Copyright (C) 2020 Nicholas H.Tollervey (ntoll@ntoll.org).

This program is free software: you can redistribute it and/or modify
it under the terms of the GNU Affero General Public License as
published by the Free Software Foundation, either version 3 of the
License, or (at your option) any later version.

This program is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU Affero General Public License for more details.

You should have received a copy of the GNU Affero General Public License
along with this program.  If not, see <https://www.gnu.org/licenses/>
"""
import structlog  # type: ignore
import svgwrite  # type: ignore
from typing import Optional, Sequence
from fusionlab import constants
from fusionlab.core import ConcretePatch, FusionRule
from fusionlab.field import Scalar, to_float


logger = structlog.get_logger()


#: Fill colours, picked by tile type index.
PALETTE = (
    "#4e79a7",
    "#f28e2b",
    "#e15759",
    "#76b7b2",
    "#59a14f",
    "#edc948",
    "#b07aa1",
    "#ff9da7",
    "#9c755f",
    "#bab0ac",
)

STROKE = "#222222"


def colour(kind: int) -> str:
    return PALETTE[kind % len(PALETTE)]


def _number(value: Scalar, scale: int) -> float:
    # Rounded so the text of the drawing does not depend on float noise.
    return round(to_float(value) * scale, 6)


def _legend(
    drawing,
    labels: Sequence[str],
    kinds: Sequence[int],
    top: float,
    scale: int,
) -> None:
    group = drawing.g(id="legend", font_size=max(scale // 2, 8))
    for offset, kind in enumerate(kinds):
        x = offset * scale * 3
        group.add(
            drawing.rect(
                insert=(x, top),
                size=(scale // 2, scale // 2),
                fill=colour(kind),
                stroke=STROKE,
            )
        )
        group.add(
            drawing.text(
                labels[kind], insert=(x + scale * 0.75, top + scale // 2)
            )
        )
    drawing.add(group)


def render_svg(
    patch: ConcretePatch, rule: FusionRule, scale: Optional[int] = None
) -> str:
    """
    SVG text for the patch. A 1-D patch is a horizontal strip of rectangles,
    each as long as its tile, with a legend underneath. A 2-D patch is drawn
    rectangle by rectangle at its exact coordinates (y grows upwards, so the
    drawing is flipped). Colours depend only on the tile type index.
    """
    scale = constants.DEFAULT_SCALE if scale is None else scale
    labels = rule.labels(patch.level)
    kinds = sorted(set(patch.kinds))
    width = max(
        (_number(p[0] + patch.sizes[k][0], scale) for k, p in patch.tiles),
        default=0,
    )
    if patch.dimension == 1:
        height = float(scale)
    else:
        height = max(
            (
                _number(p[1] + patch.sizes[k][1], scale)
                for k, p in patch.tiles
            ),
            default=0,
        )
    legend_height = scale * 1.5
    drawing = svgwrite.Drawing(
        size=(width, height + legend_height), profile="full"
    )
    tiles = drawing.g(id="tiles", stroke=STROKE, stroke_width=1)
    for kind, position in patch.tiles:
        size = patch.sizes[kind]
        x = _number(position[0], scale)
        w = _number(size[0], scale)
        if patch.dimension == 1:
            y, h = 0.0, height
        else:
            h = _number(size[1], scale)
            y = round(height - _number(position[1], scale) - h, 6)
        tiles.add(
            drawing.rect(insert=(x, y), size=(w, h), fill=colour(kind))
        )
    drawing.add(tiles)
    _legend(drawing, labels, kinds, height + scale * 0.5, scale)
    logger.info(
        "Rendered patch.",
        rule=rule.name,
        dimension=patch.dimension,
        tiles=len(patch),
    )
    return drawing.tostring()
