"""SVG rendering of a schedule as a resource profile.

Time runs along the x axis and consumption rate along the y axis. In
every interval the active jobs are stacked as rectangles whose height is
their average rate ``p_{j,i} / (t_next - t_i)``.
"""
from xml.sax.saxutils import escape

PALETTE = ("#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
           "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac")


def render_svg(inst, sched, width=720, height=360, title=None):
    """Return the SVG document for ``sched`` as a string."""
    margin_l, margin_r, margin_t, margin_b = 56, 130, 36, 40
    plot_w = width - margin_l - margin_r
    plot_h = height - margin_t - margin_b
    order = sched.order
    t = sched.times
    t_end = max(float(max(t[1:])), inst.horizon())
    y_max = inst.capacity * 1.1
    for e in range(1, len(order)):
        dt = sched.interval_length(e)
        if dt > 1e-12:
            i = order.at(e)
            load = sum(v for (j, k), v in sched.consumption.items() if k == i)
            y_max = max(y_max, 1.05 * load / dt)

    def x(v):
        return margin_l + plot_w * v / t_end

    def y(v):
        return margin_t + plot_h * (1 - v / y_max)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
           f'height="{height}" font-family="sans-serif" font-size="11">',
           f'<rect width="{width}" height="{height}" fill="white"/>']
    if title:
        out.append(f'<text x="{margin_l}" y="20" font-size="14">'
                   f'{escape(title)}</text>')
    out.append(f'<line x1="{x(0):.2f}" y1="{y(0):.2f}" x2="{x(t_end):.2f}" '
               f'y2="{y(0):.2f}" stroke="black"/>')
    out.append(f'<line x1="{x(0):.2f}" y1="{y(0):.2f}" x2="{x(0):.2f}" '
               f'y2="{y(y_max):.2f}" stroke="black"/>')
    for k in range(6):
        tv = t_end * k / 5
        out.append(f'<text x="{x(tv):.2f}" y="{y(0) + 16:.2f}" '
                   f'text-anchor="middle">{tv:.2f}</text>')
        rv = y_max * k / 5
        out.append(f'<text x="{x(0) - 6:.2f}" y="{y(rv) + 4:.2f}" '
                   f'text-anchor="end">{rv:.1f}</text>')

    for e in range(1, len(order)):
        i = order.at(e)
        dt = sched.interval_length(e)
        if dt <= 1e-12:
            continue
        base = 0.0
        for j in range(1, inst.n + 1):
            amount = sched.consumption.get((j, i), 0.0)
            if amount <= 1e-12:
                continue
            rate = amount / dt
            color = PALETTE[(j - 1) % len(PALETTE)]
            out.append(
                f'<rect x="{x(t[i]):.2f}" y="{y(base + rate):.2f}" '
                f'width="{x(t[i] + dt) - x(t[i]):.2f}" '
                f'height="{y(base) - y(base + rate):.2f}" fill="{color}" '
                f'stroke="white" stroke-width="0.5">'
                f'<title>job {j}: rate {rate:.3f}</title></rect>')
            base += rate

    out.append(f'<line x1="{x(0):.2f}" y1="{y(inst.capacity):.2f}" '
               f'x2="{x(t_end):.2f}" y2="{y(inst.capacity):.2f}" '
               'stroke="black" stroke-dasharray="4 3"/>')
    out.append(f'<text x="{x(t_end) + 4:.2f}" y="{y(inst.capacity) + 4:.2f}">'
               f'P = {inst.capacity:g}</text>')
    for j in range(1, inst.n + 1):
        ly = margin_t + 16 * (j - 1)
        if ly > height - margin_b:
            break
        color = PALETTE[(j - 1) % len(PALETTE)]
        out.append(f'<rect x="{width - margin_r + 40}" y="{ly}" width="10" '
                   f'height="10" fill="{color}"/>')
        out.append(f'<text x="{width - margin_r + 55}" y="{ly + 9}">job {j} '
                   f'(C={sched.completion(j):.2f})</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def save_svg(inst, sched, path, **kw):
    with open(path, "w") as fh:
        fh.write(render_svg(inst, sched, **kw))
