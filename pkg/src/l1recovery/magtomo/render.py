"""Pictures of a stream function: SVG with current arrows, or a binary PPM."""
import numpy as np

_STOPS = np.array([[0.23, 0.30, 0.75], [0.97, 0.97, 0.97], [0.71, 0.02, 0.15]])


def _diverging(t):
    # t in [-1, 1]: blue through white to red
    t = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
    end = np.where((t < 0)[..., None], _STOPS[0], _STOPS[2])
    rgb = _STOPS[1] + np.abs(t)[..., None] * (end - _STOPS[1])
    return np.rint(255 * rgb).astype(np.uint8)


def _scale(F):
    m = float(np.abs(F).max())
    return m if m > 0 else 1.0


def field_ppm(F, cell=4):
    """Binary PPM (P6) of ``F``; xi runs left to right, eta bottom to top."""
    F = np.asarray(F, dtype=float)
    img = _diverging(F / _scale(F))            # (N_xi, N_eta, 3)
    img = np.flip(img.transpose(1, 0, 2), axis=0)
    img = np.repeat(np.repeat(img, cell, axis=0), cell, axis=1)
    h, w, _ = img.shape
    return b"P6\n%d %d\n255\n" % (w, h) + img.tobytes()


def field_svg(F, current=None, title="", cell=6, arrow_stride=4):
    """SVG raster of ``F`` with arrows along the current, sampled every
    ``arrow_stride`` cells and scaled to the largest arrow in view."""
    F = np.asarray(F, dtype=float)
    N = F.shape[0]
    colors = _diverging(F / _scale(F))
    size = N * cell
    top = 24
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size + top}">',
           f'<text x="{size / 2}" y="16" text-anchor="middle" font-size="12">{title}</text>']
    for i in range(N):
        for j in range(N):
            r, g, b = colors[i, j]
            y = top + (N - 1 - j) * cell
            out.append(f'<rect x="{i * cell}" y="{y}" width="{cell}" height="{cell}" fill="#{r:02x}{g:02x}{b:02x}"/>')
    if current is not None:
        # components along the coordinate directions, in cells per unit
        u = np.asarray(current.flux_xi, dtype=float)
        v = np.asarray(current.flux_eta, dtype=float)
        sl = slice(arrow_stride // 2, N, arrow_stride)
        mag = np.hypot(u[sl, sl], v[sl, sl])
        peak = float(mag.max()) if mag.size else 0.0
        if peak > 0:
            L = 0.9 * arrow_stride * cell / peak
            for i in range(arrow_stride // 2, N, arrow_stride):
                for j in range(arrow_stride // 2, N, arrow_stride):
                    dx, dy = u[i, j] * L, -v[i, j] * L
                    if dx * dx + dy * dy < 1.0:
                        continue
                    x0 = (i + 0.5) * cell - dx / 2
                    y0 = top + (N - j - 0.5) * cell - dy / 2
                    out.append(_arrow(x0, y0, x0 + dx, y0 + dy))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _arrow(x0, y0, x1, y1):
    dx, dy = x1 - x0, y1 - y0
    n = np.hypot(dx, dy)
    ux, uy = dx / n, dy / n
    h = min(4.0, 0.4 * n)
    lx, ly = x1 - h * ux + 0.5 * h * uy, y1 - h * uy - 0.5 * h * ux
    rx, ry = x1 - h * ux - 0.5 * h * uy, y1 - h * uy + 0.5 * h * ux
    return (f'<path d="M{x0:.2f},{y0:.2f} L{x1:.2f},{y1:.2f} M{lx:.2f},{ly:.2f} '
            f'L{x1:.2f},{y1:.2f} L{rx:.2f},{ry:.2f}" stroke="#000000" stroke-width="0.8" fill="none"/>')
