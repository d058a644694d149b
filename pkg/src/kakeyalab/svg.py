"""Minimal deterministic SVG emission.

All geometry stays rational until the final coordinate formatting, which
renders floats with 12 significant digits.  Elements are emitted in call
order, so identical call sequences give byte-identical documents.
"""

from __future__ import annotations

from fractions import Fraction

from .numeric import Rat

__all__ = ["SvgCanvas"]


def _num(x: float) -> str:
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


class SvgCanvas:
    """Maps a rational view window onto a pixel canvas (y axis flipped)."""

    def __init__(
        self,
        width: int,
        height: int,
        view: tuple[Rat, Rat, Rat, Rat],
        margin: int = 20,
    ) -> None:
        x0, y0, x1, y1 = (Fraction(v) for v in view)
        if x0 >= x1 or y0 >= y1:
            raise ValueError("view window must have positive extent")
        self.width = width
        self.height = height
        self.margin = margin
        self._view = (x0, y0, x1, y1)
        self._sx = Fraction(width - 2 * margin) / (x1 - x0)
        self._sy = Fraction(height - 2 * margin) / (y1 - y0)
        self._elems: list[str] = []

    def x_px(self, x: Rat) -> float:
        return float(self.margin + (Fraction(x) - self._view[0]) * self._sx)

    def y_px(self, y: Rat) -> float:
        return float(self.height - self.margin - (Fraction(y) - self._view[1]) * self._sy)

    def line(
        self,
        x0: Rat,
        y0: Rat,
        x1: Rat,
        y1: Rat,
        stroke: str = "#1f3a5f",
        width: float = 1.0,
        opacity: float | None = None,
    ) -> None:
        attrs = (
            f'x1="{_num(self.x_px(x0))}" y1="{_num(self.y_px(y0))}" '
            f'x2="{_num(self.x_px(x1))}" y2="{_num(self.y_px(y1))}" '
            f'stroke="{stroke}" stroke-width="{_num(width)}"'
        )
        if opacity is not None:
            attrs += f' stroke-opacity="{_num(opacity)}"'
        self._elems.append(f"<line {attrs} />")

    def circle(self, cx: Rat, cy: Rat, radius: float = 2.0, fill: str = "#b02a2a") -> None:
        self._elems.append(
            f'<circle cx="{_num(self.x_px(cx))}" cy="{_num(self.y_px(cy))}" '
            f'r="{_num(radius)}" fill="{fill}" />'
        )

    def polygon(
        self,
        points: list[tuple[Rat, Rat]],
        fill: str = "#9db8d9",
        stroke: str = "#1f3a5f",
        opacity: float = 0.6,
    ) -> None:
        coords = " ".join(
            f"{_num(self.x_px(x))},{_num(self.y_px(y))}" for x, y in points
        )
        self._elems.append(
            f'<polygon points="{coords}" fill="{fill}" fill-opacity="{_num(opacity)}" '
            f'stroke="{stroke}" stroke-width="0.5" />'
        )

    def frame(self) -> None:
        """Border of the view window."""
        x0, y0, x1, y1 = self._view
        self._elems.append(
            f'<rect x="{_num(self.x_px(x0))}" y="{_num(self.y_px(y1))}" '
            f'width="{_num(self.x_px(x1) - self.x_px(x0))}" '
            f'height="{_num(self.y_px(y0) - self.y_px(y1))}" '
            f'fill="none" stroke="#222222" stroke-width="1" />'
        )

    def text(self, x: Rat, y: Rat, content: str, size: int = 11) -> None:
        self._elems.append(
            f'<text x="{_num(self.x_px(x))}" y="{_num(self.y_px(y))}" '
            f'font-family="monospace" font-size="{size}">{content}</text>'
        )

    def to_xml(self) -> str:
        body = "\n".join(f"  {el}" for el in self._elems)
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
            f"{body}\n</svg>\n"
        )
