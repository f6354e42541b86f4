"""Instance generators: random valid instances and the two adversarial constructions."""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidParams
from .geom import Point, format_rational, segments_properly_intersect
from .pslg import Instance, validate


class _GeneralPositionSet:
    """Incrementally grown point set that refuses points breaking general position."""

    def __init__(self):
        self.points: list[Point] = []
        self._lines: set[tuple[Fraction, Fraction]] = set()  # (inverse slope, x-intercept at y=0)
        self._ys: set[Fraction] = set()

    def try_add(self, p: Point) -> bool:
        if p.y in self._ys:
            return False
        new_lines = []
        for q in self.points:
            inv = (q.x - p.x) / (q.y - p.y)
            if inv * inv * 3 == 1:  # impossible for rationals, kept for clarity
                return False
            key = (inv, p.x - inv * p.y)
            if key in self._lines:
                return False
            new_lines.append(key)
        if len(set(new_lines)) != len(new_lines):
            return False
        self._lines.update(new_lines)
        self._ys.add(p.y)
        self.points.append(p)
        return True


def gen_random(n: int, constraint_fraction=0, seed: int = 0, *, scale: int = 1000,
               neighbours: int = 6) -> Instance:
    """Random instance in general position with about ``fraction * n`` non-crossing constraints.

    Coordinates are multiples of 1/scale in [0, 1000).  Constraints are drawn
    greedily among short pairs (each vertex's nearest neighbours), skipping any
    pair that would cross an accepted constraint.
    """
    frac = Fraction(str(constraint_fraction)) if not isinstance(constraint_fraction, Fraction) else constraint_fraction
    if n < 2:
        raise InvalidParams("n must be at least 2")
    if not (0 <= frac < 1):
        raise InvalidParams("constraint fraction must lie in [0, 1)")
    rng = random.Random(seed)
    gp = _GeneralPositionSet()
    attempts = 0
    while len(gp.points) < n:
        attempts += 1
        if attempts > 100 * n + 1000:
            raise InvalidParams("could not place points in general position")
        p = Point(Fraction(rng.randrange(1000 * scale), scale), Fraction(rng.randrange(1000 * scale), scale))
        gp.try_add(p)
    pts = gp.points

    target = int(frac * n)
    constraints: list[tuple[int, int]] = []
    if target:
        fl = [p.to_float() for p in pts]
        cand = set()
        for i in range(n):
            near = sorted(range(n), key=lambda j: (fl[i][0] - fl[j][0]) ** 2 + (fl[i][1] - fl[j][1]) ** 2)
            for j in near[1:neighbours + 1]:
                cand.add((min(i, j), max(i, j)))
        cand = sorted(cand)
        rng.shuffle(cand)
        for a, b in cand:
            if len(constraints) >= target:
                break
            if any(segments_properly_intersect(pts[a], pts[b], pts[c], pts[d]) for c, d in constraints):
                continue
            constraints.append((a, b))
    return Instance(tuple(pts), tuple(constraints), f"random-n{n}-seed{seed}")


# ---------------------------------------------------------------------------
# sidecar describing designated endpoints


@dataclass(frozen=True)
class Designated:
    instance: Instance
    s: int
    t: int
    params: dict

    def sidecar(self) -> dict:
        return {"s": self.s, "t": self.t, "params": self.params}

    def sidecar_json(self) -> str:
        return json.dumps(self.sidecar(), indent=1, sort_keys=True)


# ---------------------------------------------------------------------------
# lower-bound grid


@dataclass(frozen=True)
class GridParams:
    n: int = 16
    epsilon: Fraction = Fraction(1, 1000)
    seed: int = 0

    def check(self) -> None:
        if not isinstance(self.n, int) or self.n < 16:
            raise InvalidParams("grid dimension must be an integer >= 16")
        if not (0 < Fraction(self.epsilon) < Fraction(1, 4)):
            raise InvalidParams("epsilon must lie in (0, 1/4)")


def _sqrt_fraction(x: Fraction, digits: int = 30) -> Fraction:
    """Rational square root of a non-negative rational, truncated to ``digits`` decimals."""
    scale = 10 ** digits
    return Fraction(math.isqrt(x.numerator * scale * scale // x.denominator), scale)


def _jitter(rng: random.Random, bound: Fraction, resolution: int = 10 ** 6) -> Fraction:
    return bound * Fraction(rng.randrange(-resolution + 1, resolution), resolution)


def gen_lower_bound_grid(params: GridParams = GridParams()) -> Designated:
    """Staggered n x n grid whose horizontal edges are constraints, with s below and t above.

    Rows are one unit apart and points within a row n units apart; odd rows are
    shifted right by n/2.  The bottom row follows the upper hull of a flat
    ellipse and the top row the lower hull of one, so s (resp. t) is the
    closest vertex in a subcone of every bottom-row (resp. top-row) vertex.
    Interior vertices get a seeded jitter in (-eps, eps)^2; the two curved rows
    get a much smaller one so that the jitter cannot undo their curvature.
    """
    params.check()
    n, eps = params.n, Fraction(params.epsilon)
    rng = random.Random(params.seed)
    width = Fraction((n - 1) * n)
    centre = width / 2 + Fraction(n, 4)
    semi_major = Fraction(n * n, 2) + n  # a little wider than the row, so the row ends stay on the arc
    sag = eps

    def hull_offset(x: Fraction) -> Fraction:
        u = (x - centre) / semi_major
        return sag * _sqrt_fraction(1 - u * u) - sag  # in (-sag, 0]; 0 at the centre

    gp = _GeneralPositionSet()
    rows: list[list[int]] = []
    vertices: list[Point] = []
    fine = eps / Fraction(n) ** 4
    for r in range(n):
        row = []
        for j in range(n):
            x0 = Fraction(j * n) + (Fraction(n, 2) if r % 2 else 0)
            if r == 0:
                y0 = hull_offset(x0)  # arc bulging upwards
            elif r == n - 1:
                y0 = Fraction(r) - hull_offset(x0)  # arc bulging downwards
            else:
                y0 = Fraction(r)
            bound = fine if r in (0, n - 1) else eps
            for _ in range(1000):
                p = Point(x0 + _jitter(rng, bound), y0 + _jitter(rng, bound))
                if gp.try_add(p):
                    break
            else:
                raise InvalidParams("could not perturb the grid into general position")
            row.append(len(vertices))
            vertices.append(p)
        rows.append(row)
    s_pt = Point(centre, Fraction(-1))
    t_pt = Point(centre, Fraction(n))
    for p in (s_pt, t_pt):
        if not gp.try_add(p):
            raise InvalidParams("designated endpoints break general position")
    s, t = len(vertices), len(vertices) + 1
    vertices += [s_pt, t_pt]
    constraints = [(row[j], row[j + 1]) for row in rows for j in range(n - 1)]
    inst = Instance(tuple(vertices), tuple(constraints), f"grid-n{n}-seed{params.seed}")
    bad = validate(inst)
    if bad:
        raise InvalidParams(f"grid construction produced an invalid instance: {bad[0]}")
    info = {"kind": "grid", "n": n, "epsilon": format_rational(eps), "seed": params.seed,
            "rows": rows}
    return Designated(inst, s, t, info)


# ---------------------------------------------------------------------------
# doubling-search worst case for negative routing

LITERAL_DOUBLINGS = 4  # budgets 1, 2, 4, 8, 16: the shortest schedule with the full switch pattern


@dataclass(frozen=True)
class WorstCaseParams:
    alpha: Fraction = Fraction(2425, 10000)
    epsilon: Fraction = Fraction(1, 1000)
    st_length: Fraction = Fraction(1)

    def check(self) -> None:
        a, e, ln = Fraction(self.alpha), Fraction(self.epsilon), Fraction(self.st_length)
        if not (0 <= a < Fraction(1, 2)):
            raise InvalidParams("alpha must lie in [0, 1/2)")  # the switch schedule degenerates near pi/6
        if not (0 < e <= Fraction(1, 100)):
            raise InvalidParams("epsilon must lie in (0, 1/100]")
        if ln <= 0:
            raise InvalidParams("st_length must be positive")


def _polyline_point(path: list[tuple[float, float]], d: float) -> tuple[float, float]:
    for (ax, ay), (bx, by) in zip(path, path[1:]):
        seg = math.hypot(bx - ax, by - ay)
        if d <= seg:
            f = d / seg
            return ax + f * (bx - ax), ay + f * (by - ay)
        d -= seg
    return path[-1]


def _polyline_length(path) -> float:
    return math.fsum(math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(path, path[1:]))


def gen_negative_worst_case(params: WorstCaseParams = WorstCaseParams(), *,
                            doublings: int = 8) -> Designated:
    """Two vertex chains hugging the sides of the canonical triangle of t towards s.

    The right chain carries the positive path from t to s; the left chain ends
    in a dead end next to t.  Chain vertices sit at path distances that make
    the doubling search turn back at every other stop: right stops at 1, 4,
    16, ..., left stops at 2, 8, ..., until the right side's final budget
    ``2**doublings`` carries it to the vertex next to t.  All placements are
    moved slightly inside the triangle along convex arcs, which keeps them in
    general position without disturbing the schedule.
    """
    params.check()
    if doublings < 2 or doublings % 2:
        raise InvalidParams("doublings must be an even integer >= 2")
    alpha, eps = float(params.alpha), float(params.epsilon)
    final = 2.0 ** doublings
    slack = eps / 4  # every stop sits this fraction short of its budget
    sqrt3 = math.sqrt(3)
    st = final * (1 + eps) / (sqrt3 * math.cos(alpha) + math.sin(alpha))
    s = (0.0, 0.0)
    t = (st * math.sin(alpha), -st * math.cos(alpha))
    height = -t[1]
    right_corner = (t[0] + height / sqrt3, 0.0)
    left_corner = (t[0] - height / sqrt3, 0.0)
    right_path = [s, right_corner, t]
    left_path = [s, left_corner, t]

    def inward(path, d, depth_scale):
        """Ideal boundary point at path distance d, moved strictly inside the triangle.

        Along the top edge the depth grows like d**2, so the chain descends
        towards the corner; the corner vertex is the deepest of them.  Along the
        slanted side the offset shrinks quadratically towards t, which makes
        every vertex see its predecessor inside its upward cone.
        """
        corner = path[1]
        corner_d = abs(corner[0] - s[0])
        side_len = math.hypot(t[0] - corner[0], t[1] - corner[1])
        towards_inside = -1.0 if path is right_path else 1.0  # horizontal direction into the triangle
        corner_depth = depth_scale * eps * corner_d ** 2 / final
        if d < corner_d - 1e-12 * final:
            x, _ = _polyline_point(path, d)
            return x, -depth_scale * eps * d ** 2 / final
        corner_offset = corner_depth * math.sqrt(3) / 2  # distance of the corner vertex from the side line
        if d <= corner_d + 1e-12 * final:
            return (corner[0] + towards_inside * corner_depth * (1 + 1 / math.sqrt(3)), -corner_depth)
        q = side_len - (d - corner_d)  # distance from t along the side
        bx, by = _polyline_point(path, d)
        ux, uy = (corner[0] - t[0]) / side_len, (corner[1] - t[1]) / side_len
        nx, ny = (-uy, ux) if path is right_path else (uy, -ux)
        h = corner_offset * (q / side_len) ** 2
        return bx + h * nx, by + h * ny

    def chain(path, stops, extra, depth_scale):
        """Place stops at exact chain distances, with free vertices at the given ideal distances."""
        marks = sorted([(d, True) for d in stops] + [(d, False) for d in extra])
        pts, walked, prev = [], 0.0, s
        for d_ideal, is_stop in marks:
            if not is_stop:
                p = inward(path, d_ideal, depth_scale)
            else:
                # solve for the ideal position whose placed point lies at chain distance d_ideal
                guess = d_ideal
                for _ in range(50):
                    p = inward(path, guess, depth_scale)
                    err = d_ideal - (walked + math.hypot(p[0] - prev[0], p[1] - prev[1]))
                    if abs(err) < 1e-12 * final:
                        break
                    guess += err
            walked += math.hypot(p[0] - prev[0], p[1] - prev[1])
            pts.append((p, walked, is_stop))
            prev = p
        return pts

    def boundary_marks(corner_d, end_d):
        pieces = max(1, math.ceil((end_d - corner_d) / (final / 2)))
        return [corner_d + (end_d - corner_d) * i / pieces for i in range(1, pieces)]

    right_total = _polyline_length(right_path)
    left_total = _polyline_length(left_path)
    right_corner_d = right_corner[0]
    left_corner_d = -left_corner[0]

    # right side: first edge defines the unit budget, then 4, 16, ... and finally `final`
    right_stops = [1.0] + [4.0 ** j * (1 - slack) for j in range(1, doublings // 2)] + [final * (1 - slack)]
    left_stops = [2.0 * 4.0 ** j * (1 - slack) for j in range(doublings // 2)]
    last_right_gap = right_total - right_stops[-1]
    left_end = left_total - 1.5 * last_right_gap  # dead end: next to t, above the right side's last vertex
    # distinct bulge depths on the two sides keep mirrored vertices off a common horizontal
    right = chain(right_path, right_stops,
                  [right_corner_d] + boundary_marks(right_corner_d, right_stops[-1]), 1.0)
    left = chain(left_path, left_stops + [left_end], [left_corner_d], 0.7)

    # schedule sanity: every non-stop vertex must lie past the previous budget of its side
    def check_side(side, budgets):
        for p, walked, is_stop in side:
            for b in budgets:
                if not is_stop and b * (1 - slack) <= walked <= b:
                    raise InvalidParams("alpha leaves a corner vertex inside a search budget")
    check_side(right, [4.0 ** j for j in range(doublings // 2 + 1)])
    check_side(left, [2.0 * 4.0 ** j for j in range(doublings // 2 + 1)])
    right_reach = right[-1][1] + math.hypot(right[-1][0][0] - t[0], right[-1][0][1] - t[1])
    if right_reach <= final * (1 + slack):
        raise InvalidParams("the final budget would already reach t")
    if not (final / 2 < left[-1][1] <= 2 * final):
        raise InvalidParams("alpha puts the dead end outside the last left budget")
    if left[-1][0][1] <= right[-1][0][1]:
        raise InvalidParams("the dead end must lie above the right side's last vertex")

    scale = float(params.st_length) / st

    def exact(p):
        return Point(Fraction(p[0] * scale).limit_denominator(10 ** 12),
                     Fraction(p[1] * scale).limit_denominator(10 ** 12))

    vertices = [exact(s), exact(t)]
    labels = {"s": 0, "t": 1}
    for name, side in (("r", right), ("l", left)):
        for i, (p, _, _) in enumerate(side, start=1):
            labels[f"{name}{i}"] = len(vertices)
            vertices.append(exact(p))
    inst = Instance(tuple(vertices), (), f"worstcase-alpha{format_rational(Fraction(params.alpha))}"
                    f"-d{doublings}")
    bad = validate(inst)
    if bad:
        raise InvalidParams(f"worst-case placement violates general position: {bad[0]}")
    info = {
        "kind": "worstcase",
        "alpha": format_rational(Fraction(params.alpha)),
        "epsilon": format_rational(Fraction(params.epsilon)),
        "st_length": format_rational(Fraction(params.st_length)),
        "doublings": doublings,
        "labels": labels,
        "turn_points": [f"r{right.index(x) + 1}" if x in right else f"l{left.index(x) + 1}"
                        for x in _turn_schedule(right, left)],
    }
    return Designated(inst, 0, 1, info)


def _turn_schedule(right, left):
    """Stops in the order the doubling search turns back at them, ending with the dead end."""
    r = [x for x in right if x[2]]
    l = [x for x in left if x[2]]
    order = []
    for i in range(len(r)):
        order.append(r[i])
        if i < len(l):
            order.append(l[i])
    return order
