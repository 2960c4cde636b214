"""
Chern-Simons forms and functionals for matrix connections on trivialized bundles.

A connection is a vectorised evaluator returning the anti-Hermitian
components A_mu at points, shape (m, dim, N, N); partial derivatives have
shape (m, dim, dim, N, N) with d[:, nu, mu] = d_nu A_mu. Curvature is
F = dA + A^A. Real forms built from an invariant polynomial are
Phi((i/2pi) F ^ (i/2pi) F) and its transgressions, so that integral classes
have integer periods. Torus domains are the unit cube with period 1.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import expm

from .circle import FLOAT, CircleValue
from .conf import setting
from .exceptions import ParameterError, PreconditionError
from .forms import FormField, _directional
from .quadrature import interval_rule, periodic_grid, permutation_sign
from .reports import CheckReport

logger = logging.getLogger(__name__)

SU2_BASIS = np.array([[[0, 1j], [1j, 0]], [[0, 1], [-1, 0]], [[1j, 0], [0, -1j]]], dtype=complex)
SHUFFLES = ((1, (0, 1), (2, 3)), (-1, (0, 2), (1, 3)), (1, (0, 3), (1, 2)),
            (1, (1, 2), (0, 3)), (-1, (1, 3), (0, 2)), (1, (2, 3), (0, 1)))
PERMUTATIONS_3 = [(perm, permutation_sign(perm)) for perm in itertools.permutations(range(3))]
# Cubic coefficients in use: 1/3 as often written, 2/3 for Tr(A dA + 2/3 A^3).
CUBIC_CONVENTIONS = (Fraction(1, 3), Fraction(2, 3))


def _dagger(X):
    return np.conj(np.swapaxes(X, -1, -2))


class LatticeConnection:
    """Lie-algebra valued 1-form given by its components on a periodic grid or a coordinate box"""

    def __init__(self, fn, dim, size, partials=None, closed=True, name=''):
        self.fn = fn
        self.dim = dim
        self.size = size
        self._partials = partials
        self.closed = closed
        self.name = name

    def __call__(self, points):
        return np.asarray(self.fn(np.atleast_2d(points)), dtype=complex)

    def partials(self, points, step=None):
        points = np.atleast_2d(points)
        if self._partials is not None:
            return np.asarray(self._partials(points), dtype=complex)
        step = setting('FINITE_DIFFERENCE_STEP') if step is None else step
        eye = np.eye(self.dim)
        return np.stack([_directional(self, points, np.broadcast_to(eye[nu], points.shape), step)
                         for nu in range(self.dim)], axis=1)

    @property
    def analytic(self):
        return self._partials is not None

    def contract(self, points, vectors):
        """A(v) for vectors of shape (m, r, dim): shape (m, r, N, N)"""
        return np.einsum('mri,mikl->mrkl', vectors, self(points))

    def __add__(self, other):
        partials = None
        if self.analytic and other.analytic:
            partials = lambda p: self._partials(p) + other._partials(p)  # noqa: E731
        return LatticeConnection(lambda p: self(p) + other(p), self.dim, self.size, partials,
                                 self.closed and other.closed, f'{self.name}+{other.name}')

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def scaled(self, factor):
        partials = (lambda p: factor * self._partials(p)) if self.analytic else None
        return LatticeConnection(lambda p: factor * self(p), self.dim, self.size, partials, self.closed,
                                 f'{factor}*{self.name}')

    def validate(self, points, tol=1e-12, seam_tol=1e-10):
        """Anti-Hermitian residual and, on tori, agreement across the seams"""
        values = self(points)
        skew = float(np.max(np.abs(values + _dagger(values)))) if values.size else 0.0
        seam = 0.0
        if self.closed:
            for axis in range(self.dim):
                shifted = np.array(points, dtype=float, copy=True)
                shifted[:, axis] += 1.0
                seam = max(seam, float(np.max(np.abs(self(shifted) - values))))
        passed = skew <= tol and seam <= seam_tol
        return CheckReport(f'connection {self.name}'.strip(), passed, max(skew, seam),
                           {'anti_hermitian': skew, 'seam': seam})


class GaugeTransformation:
    """U(N)-valued function; ``degree`` is an optional winding hint"""

    def __init__(self, fn, dim, size, degree=None, name=''):
        self.fn = fn
        self.dim = dim
        self.size = size
        self.degree = degree
        self.name = name

    def __call__(self, points):
        return np.asarray(self.fn(np.atleast_2d(points)), dtype=complex)

    def partials(self, points, step=None):
        step = setting('FINITE_DIFFERENCE_STEP') if step is None else step
        eye = np.eye(self.dim)
        return np.stack([_directional(self, points, np.broadcast_to(eye[nu], points.shape), step)
                         for nu in range(self.dim)], axis=1)

    def unitarity_residual(self, points):
        g = self(points)
        return float(np.max(np.abs(_dagger(g) @ g - np.eye(self.size))))


class InvariantPolynomial:
    """Level-k symmetric invariant bilinear form on u(N).

    ``second_chern``: Phi(X) = (k/2)((Tr X)^2 - Tr X^2); ``trace_square``: Phi(X) = -(k/2) Tr X^2.
    Both give Phi((i/2pi)F) = (k/8pi^2) Tr(F^F) on su(N).
    """
    KINDS = ('second_chern', 'trace_square')

    def __init__(self, level=1, kind='second_chern'):
        if kind not in self.KINDS:
            raise ParameterError(f'unknown invariant polynomial {kind!r}')
        if int(level) != level:
            raise ParameterError('the level must be an integer')
        self.level = int(level)
        self.kind = kind

    def bilinear(self, X, Y):
        product = np.trace(X @ Y, axis1=-2, axis2=-1)
        if self.kind == 'trace_square':
            return -self.level / 2 * product
        return self.level / 2 * (np.trace(X, axis1=-2, axis2=-1) * np.trace(Y, axis1=-2, axis2=-1) - product)

    def __call__(self, X):
        return self.bilinear(X, X)

    def at_level(self, level):
        return InvariantPolynomial(level, self.kind)

    def ad_invariance_residual(self, size, rng, samples=20):
        X = random_algebra(size, rng, samples)
        g = expm(random_algebra(size, rng, samples))
        return float(np.max(np.abs(self(g @ X @ _dagger(g)) - self(X))))


def random_algebra(size, rng, count):
    """Random elements of u(N), shape (count, N, N)"""
    Z = rng.normal(size=(count, size, size)) + 1j * rng.normal(size=(count, size, size))
    return (Z - _dagger(Z)) / 2


def _commutators(A):
    return np.einsum('maij,mbjk->mabik', A, A) - np.einsum('mbij,majk->mabik', A, A)


def curvature_2form(A, points, t=1.0, partials=None):
    """Components F_(mu nu) = t(d_mu A_nu - d_nu A_mu) + t^2 [A_mu, A_nu], shape (m, dim, dim, N, N)"""
    points = np.atleast_2d(points)
    d = A.partials(points) if partials is None else partials
    dA = d - np.swapaxes(d, 1, 2)
    return t * dA + t * t * _commutators(A(points))


def _contract2(F, u, v):
    return np.einsum('mi,mj,mijkl->mkl', u, v, F)


def bianchi_residual(A, points, step=None):
    """max |d_l F_mn + [A_l, F_mn] + cyclic|"""
    points = np.atleast_2d(points)
    step = setting('FINITE_DIFFERENCE_STEP') if step is None else step
    eye = np.eye(A.dim)
    F = curvature_2form(A, points)
    connection = A(points)
    dF = [_directional(lambda p: curvature_2form(A, p), points, np.broadcast_to(eye[l], points.shape), step)
          for l in range(A.dim)]
    worst = 0.0
    for l, m, n in itertools.combinations(range(A.dim), 3):
        total = 0
        for a, b, c in ((l, m, n), (m, n, l), (n, l, m)):
            total = total + dF[a][:, b, c] + connection[:, a] @ F[:, b, c] - F[:, b, c] @ connection[:, a]
        worst = max(worst, float(np.max(np.abs(total))))
    return worst


class _ConnectionForm(FormField):
    def __init__(self, degree, connection):
        super().__init__(degree)
        self.connection = connection

    def connection_for(self, chart):
        if isinstance(self.connection, dict):
            return self.connection[chart]
        return self.connection


class FirstChernForm(_ConnectionForm):
    """(i/2pi) Tr F"""

    def __init__(self, connection):
        super().__init__(2, connection)

    def evaluate(self, chart, points, vectors):
        F = curvature_2form(self.connection_for(chart), points)
        X = _contract2(F, vectors[:, 0], vectors[:, 1])
        return np.real(1j / (2 * np.pi) * np.trace(X, axis1=-2, axis2=-1))


class ChernWeilForm(_ConnectionForm):
    """Phi((i/2pi) F ^ (i/2pi) F) as a real 4-form"""

    def __init__(self, connection, phi):
        super().__init__(4, connection)
        self.phi = phi

    def evaluate(self, chart, points, vectors):
        F = curvature_2form(self.connection_for(chart), points)
        pieces = {pair: _contract2(F, vectors[:, pair[0]], vectors[:, pair[1]])
                  for _, first, second in SHUFFLES for pair in (first, second)}
        total = sum(sign * self.phi.bilinear(pieces[first], pieces[second]) for sign, first, second in SHUFFLES)
        return np.real(-total / (4 * np.pi ** 2))


def chern_weil_4form(A, phi):
    return ChernWeilForm(A, phi)


class RelativeChernSimonsForm(_ConnectionForm):
    """CS(A, A') = -(2/4pi^2) int_0^1 Phi((A - A') ^ F_(A_t)) dt with A_t = A' + t(A - A').

    Its integral over a closed 3-manifold is CS(A) - CS(A').
    """

    def __init__(self, connection, reference, phi, nodes=3):
        super().__init__(3, connection)
        self.reference = reference
        self.phi = phi
        self.nodes = nodes

    def evaluate(self, chart, points, vectors):
        A = self.connection_for(chart)
        B = self.reference
        a, b = A(points), B(points)
        da, db = A.partials(points), B.partials(points)
        alpha = np.einsum('mri,mikl->mrkl', vectors, a - b)
        times, weights = interval_rule(self.nodes)
        total = np.zeros(points.shape[0], dtype=complex)
        for t, weight in zip(times, weights):
            at = b + t * (a - b)
            dt = db + t * (da - db)
            F = dt - np.swapaxes(dt, 1, 2) + _commutators(at)
            u1, u2, u3 = vectors[:, 0], vectors[:, 1], vectors[:, 2]
            term = (self.phi.bilinear(alpha[:, 0], _contract2(F, u2, u3))
                    - self.phi.bilinear(alpha[:, 1], _contract2(F, u1, u3))
                    + self.phi.bilinear(alpha[:, 2], _contract2(F, u1, u2)))
            total += weight * term
        return np.real(-2 * total / (4 * np.pi ** 2))


def flat(dim=3, size=2):
    return LatticeConnection(lambda p: np.zeros((p.shape[0], dim, size, size), dtype=complex), dim, size,
                             lambda p: np.zeros((p.shape[0], dim, dim, size, size), dtype=complex), name='flat')


def cs_form_path(A, phi):
    """CS form along t -> tA from the trivial connection"""
    return RelativeChernSimonsForm(A, flat(A.dim, A.size), phi)


def relative_cs_form(A, reference, phi):
    return RelativeChernSimonsForm(A, reference, phi)


def _algebra_element(element, size=2):
    """A matrix, or su(2) coordinates in the basis i sigma_a"""
    value = np.asarray(element, dtype=complex)
    if value.shape == (3,) and size == 2:
        return np.einsum('a,aij->ij', value, SU2_BASIS)
    return value.reshape(size, size)


def constant(components, size=2):
    matrices = np.stack([_algebra_element(c, size) for c in components])
    dim = matrices.shape[0]
    return LatticeConnection(lambda p: np.broadcast_to(matrices, (p.shape[0],) + matrices.shape).copy(), dim, size,
                             lambda p: np.zeros((p.shape[0], dim) + matrices.shape, dtype=complex),
                             name='constant')


def trig(seed, dim=3, count=4, amplitude=0.3, max_frequency=1):
    """Smooth periodic su(2) connection: sums of a sin(2 pi k.x + phase) (i sigma_a) dx^mu"""
    rng = np.random.default_rng(seed)
    terms = []
    for _ in range(count):
        terms.append((int(rng.integers(dim)), SU2_BASIS[int(rng.integers(3))], amplitude * rng.uniform(-1, 1),
                      rng.integers(-max_frequency, max_frequency + 1, size=dim).astype(float),
                      rng.uniform(0, 2 * np.pi)))

    def fn(p):
        out = np.zeros((p.shape[0], dim, 2, 2), dtype=complex)
        for mu, T, a, k, phase in terms:
            out[:, mu] += (a * np.sin(2 * np.pi * p @ k + phase))[:, None, None] * T
        return out

    def partials(p):
        out = np.zeros((p.shape[0], dim, dim, 2, 2), dtype=complex)
        for mu, T, a, k, phase in terms:
            c = a * 2 * np.pi * np.cos(2 * np.pi * p @ k + phase)
            for nu in range(dim):
                if k[nu]:
                    out[:, nu, mu] += (k[nu] * c)[:, None, None] * T
        return out
    return LatticeConnection(fn, dim, 2, partials, name=f'trig({seed})')


def abelian_flux(n, m):
    """diag(A^(n), A^(m)) on S^2 x S^2 in (theta1, phi1, theta2, phi2), A^(n) = -i(n/2)(1 - cos theta) dphi"""
    charges = ((n, 0, 1), (m, 2, 3))

    def fn(p):
        out = np.zeros((p.shape[0], 4, 2, 2), dtype=complex)
        for slot, (q, theta, phi) in enumerate(charges):
            out[:, phi, slot, slot] = -0.5j * q * (1 - np.cos(p[:, theta]))
        return out

    def partials(p):
        out = np.zeros((p.shape[0], 4, 4, 2, 2), dtype=complex)
        for slot, (q, theta, phi) in enumerate(charges):
            out[:, theta, phi, slot, slot] = -0.5j * q * np.sin(p[:, theta])
        return out
    return LatticeConnection(fn, 4, 2, partials, closed=False, name=f'abelian_flux({n},{m})')


def monopole_connection(n, north=True):
    """U(1) monopole potential on R^3 minus an axis: -2 pi i times the real potential of charge n"""
    sign = 1 if north else -1

    def fn(p):
        x, y, z = p[:, 0], p[:, 1], p[:, 2]
        r = np.sqrt(x * x + y * y + z * z)
        factor = sign * n / (4 * np.pi) / (r * (r + sign * z))
        out = np.zeros((p.shape[0], 3, 1, 1), dtype=complex)
        out[:, 0, 0, 0] = -2j * np.pi * factor * (-y)
        out[:, 1, 0, 0] = -2j * np.pi * factor * x
        return out
    return LatticeConnection(fn, 3, 1, closed=False, name=f'monopole({n},{"N" if north else "S"})')


def pullback_connection(A, M):
    """(M^* A)_mu(x) = sum_nu A_nu(Mx mod 1) M_(nu mu) for an integer matrix M"""
    M = np.asarray(M, dtype=float)

    def fn(p):
        return np.einsum('mnkl,nu->mukl', A((p @ M.T) % 1.0), M)

    partials = None
    if A.analytic:
        def partials(p):
            d = A.partials((p @ M.T) % 1.0)
            return np.einsum('mabkl,as,bu->msukl', d, M, M)
    return LatticeConnection(fn, A.dim, A.size, partials, A.closed, f'M*{A.name}')


def gauge_transform(A, g, check_points=None, tol=1e-10):
    """A^g = g^-1 A g + g^-1 dg"""
    if check_points is not None:
        residual = g.unitarity_residual(check_points)
        if residual > tol:
            raise PreconditionError(f'gauge transformation {g.name} is not unitary (residual {residual:.3g})')

    def fn(p):
        h = g(p)
        inverse = _dagger(h)
        dg = g.partials(p)
        return inverse[:, None] @ A(p) @ h[:, None] + inverse[:, None] @ dg
    return LatticeConnection(fn, A.dim, A.size, closed=A.closed, name=f'{A.name}^{g.name}')


def constant_gauge(components):
    X = _algebra_element(components)
    element = expm(X)
    return GaugeTransformation(lambda p: np.broadcast_to(element, (p.shape[0], 2, 2)).copy(), 3, 2, 0, 'constant')


def _smooth_step(u):
    u = np.clip(u, 0.0, 1.0)
    f = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
    v = 1.0 - u
    g = np.where(v > 0, np.exp(-1.0 / np.where(v > 0, v, 1.0)), 0.0)
    return f / (f + g)


def bump_degree(w, radius=0.45, center=(0.5, 0.5, 0.5)):
    """SU(2)-valued map of degree w on T^3: cos(w rho) I - sin(w rho) r^.T, identity outside a ball"""
    center = np.asarray(center, dtype=float)

    def fn(p):
        x = p % 1.0 - center
        r = np.linalg.norm(x, axis=1)
        rho = np.pi * (1.0 - _smooth_step(r / radius))
        unit = x / np.where(r > 0, r, 1.0)[:, None]
        out = np.cos(w * rho)[:, None, None] * np.eye(2)
        return out - np.sin(w * rho)[:, None, None] * np.einsum('ma,aij->mij', unit, SU2_BASIS)
    return GaugeTransformation(fn, 3, 2, w, f'bump_degree({w})')


def abelian_winding(w, axis=0):
    """exp(2 pi i w x H) with H = diag(1, -1)"""
    def fn(p):
        phase = np.exp(2j * np.pi * w * p[:, axis])
        out = np.zeros((p.shape[0], 2, 2), dtype=complex)
        out[:, 0, 0] = phase
        out[:, 1, 1] = np.conj(phase)
        return out
    return GaugeTransformation(fn, 3, 2, 0, f'abelian_winding({w})')


def trig_gauge(seed, amplitude=1.0):
    """exp of a smooth periodic su(2) field: degree zero"""
    generator = trig(seed, amplitude=amplitude)

    def fn(p):
        return expm(generator(p)[:, 0])
    return GaugeTransformation(fn, 3, 2, 0, f'trig_gauge({seed})')


def _grid(grid):
    grid = setting('CS_GRID') if grid is None else grid
    if grid < 4:
        raise ParameterError('grid needs at least 4 points per side')
    return periodic_grid(grid, 3)


def torus_integral(form, grid=None, M=None):
    """int over T^3 of M^* form by the periodic trapezoid rule"""
    points, weight = _grid(grid)
    M = np.eye(3) if M is None else np.asarray(M, dtype=float)
    vectors = np.broadcast_to(M.T[None, :, :], (points.shape[0], 3, 3))
    return float(weight * np.sum(form.evaluate(None, (points @ M.T) % 1.0, vectors)))


def _require_closed(A):
    if not A.closed:
        raise PreconditionError('the Chern-Simons functional needs a closed 3-dimensional domain')
    if A.dim != 3:
        raise PreconditionError('the Chern-Simons functional is defined on 3-dimensional tori')


def cs_explicit(A, phi=None, grid=None, cubic=None):
    """(k/8pi^2) int eps [Tr(A_mu d_nu A_rho) + c Tr(A_mu A_nu A_rho)], less the U(1) trace part for second_chern"""
    phi = phi or InvariantPolynomial()
    cubic = setting('CS_CUBIC_COEFFICIENT') if cubic is None else cubic
    _require_closed(A)
    points, weight = _grid(grid)
    a = A(points)
    d = A.partials(points)
    density = np.zeros(points.shape[0], dtype=complex)
    for (mu, nu, rho), sign in PERMUTATIONS_3:
        density += sign * np.trace(a[:, mu] @ d[:, nu, rho], axis1=-2, axis2=-1)
        density += sign * float(cubic) * np.trace(a[:, mu] @ a[:, nu] @ a[:, rho], axis1=-2, axis2=-1)
        if phi.kind == 'second_chern':
            density -= sign * np.trace(a[:, mu], axis1=-1, axis2=-2) * np.trace(d[:, nu, rho], axis1=-2, axis2=-1)
    unit = float(np.real(weight * np.sum(density))) / (8 * np.pi ** 2)
    return phi.level * unit


def pure_gauge_constant(cubic=None):
    """rho with CS(g^-1 dg) = rho * level * deg(g): 3(c - 1)"""
    cubic = setting('CS_CUBIC_COEFFICIENT') if cubic is None else cubic
    return 3 * (cubic - 1)


def degree_oracle(g, grid=None, step=None):
    """(1/2pi^2) int det[q, d1 q, d2 q, d3 q] with g = q0 I + q_a (i sigma_a)"""
    if g.size != 2:
        raise ParameterError('the degree oracle reads SU(2)-valued maps')
    points, weight = _grid(grid)
    step = setting('FINITE_DIFFERENCE_STEP') if step is None else step

    def quaternion(p):
        h = g(p)
        q0 = np.real(np.trace(h, axis1=-2, axis2=-1)) / 2
        qa = [np.real(np.trace(np.einsum('ij,mjk->mik', s, h), axis1=-2, axis2=-1) / 2j) for s in
              (np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]]))]
        return np.stack([q0] + qa, axis=1)

    q = quaternion(points)
    eye = np.eye(3)
    columns = [q] + [_directional(quaternion, points, np.broadcast_to(eye[j], points.shape), step) for j in range(3)]
    return float(weight * np.sum(np.linalg.det(np.stack(columns, axis=2)))) / (2 * np.pi ** 2)


def gauge_shift_check(A, g, phi=None, grid=None, tol=1e-3, cubic=None):
    """CS(A^g) - CS(A) must be an integer; reports the SU(2) degree alongside"""
    phi = phi or InvariantPolynomial()
    cubic = setting('CS_CUBIC_COEFFICIENT') if cubic is None else cubic
    points, _ = _grid(grid)
    transformed = gauge_transform(A, g, check_points=points[::max(1, len(points) // 64)])
    before = cs_explicit(A, phi, grid, cubic)
    after = cs_explicit(transformed, phi, grid, cubic)
    shift = after - before
    distance = abs(shift - round(shift))
    details = {'before': before, 'after': after, 'shift': shift, 'nearest_integer': int(round(shift)),
               'distance': distance, 'cubic': cubic, 'rho': pure_gauge_constant(cubic),
               'rho_by_cubic': {str(c): pure_gauge_constant(c) for c in CUBIC_CONVENTIONS}}
    if g.size == 2:
        details['degree'] = degree_oracle(g, grid)
    passed = distance <= tol
    if not passed:
        logger.warning('gauge shift %.6g of %s is not an integer', shift, g.name)
    return CheckReport(f'gauge shift {g.name}', passed, distance, details)


@dataclass
class CField:
    """A connection together with a 3-form c on T^3"""
    connection: LatticeConnection
    c: FormField
    name: str = ''


class CurvatureCharacter:
    """A degree-2 character known through its curvature 3-form"""

    def __init__(self, curvature, name=''):
        self.degree = 2
        self.curvature = curvature
        self.name = name


class _SumForm(FormField):
    def __init__(self, forms):
        super().__init__(forms[0].degree)
        self.forms = forms

    def evaluate(self, chart, points, vectors):
        return sum(form.evaluate(chart, points, vectors) for form in self.forms)


TEST_CYCLES = (
    ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    ((1, 1, 0), (0, 1, 0), (0, 0, 1)),
    ((2, 0, 0), (0, 1, 0), (0, 0, 1)),
    ((0, 1, 0), (1, 0, 0), (0, 0, 1)),
    ((1, 0, 0), (0, 1, 1), (0, 0, 1)),
)


def cfield_holonomy(cf, M=None, phi=None, grid=None):
    """exp(2 pi i int_(M_*[T^3]) (CS(A) + c)) as an angle"""
    phi = phi or InvariantPolynomial()
    _require_closed(cf.connection)
    value = torus_integral(_SumForm([cs_form_path(cf.connection, phi), cf.c]), grid, M)
    return CircleValue(value, FLOAT)


def cfield_act(alpha, character, cf, phi=None, grid=None, tol=1e-6):
    """(alpha, D).(A, c) = (A + alpha, c + CS(A, A + alpha) + curv(D))"""
    phi = phi or InvariantPolynomial()
    pieces = [cf.c]
    A = cf.connection
    moved = A if alpha is None else A + alpha
    if alpha is not None:
        pieces.append(relative_cs_form(A, moved, phi))
    if character is not None:
        curvature = character.curvature
        if curvature.degree != 3:
            raise PreconditionError('the character must have a curvature 3-form')
        period = torus_integral(curvature, grid)
        if abs(period - round(period)) > tol:
            raise PreconditionError(f'curvature period {period:.6g} is not an integer')
        pieces.append(curvature)
    return CField(moved, _SumForm(pieces) if len(pieces) > 1 else cf.c, f'acted({cf.name})')


def gauge_act_cfield(g, cf, phi=None):
    """g.(A, c) = (A^g, c + CS(A, A^g))"""
    phi = phi or InvariantPolynomial()
    moved = gauge_transform(cf.connection, g)
    return CField(moved, _SumForm([cf.c, relative_cs_form(cf.connection, moved, phi)]), f'{g.name}.{cf.name}')


def cfield_equivalence_check(first, second, cycles=TEST_CYCLES, phi=None, grid=None, tol=1e-4):
    """Compare the degree-3 holonomies of two C-fields on linear test cycles of T^3"""
    rows = []
    worst = 0.0
    for M in cycles:
        a = cfield_holonomy(first, M, phi, grid)
        b = cfield_holonomy(second, M, phi, grid)
        defect = a.distance(b)
        worst = max(worst, defect)
        rows.append({'cycle': [list(r) for r in M], 'first': a, 'second': b, 'defect': defect})
    passed = worst <= tol
    if not passed:
        logger.warning('C-fields %s and %s disagree by %.3g', first.name, second.name, worst)
    return CheckReport('C-field equivalence', passed, worst, {'cycles': rows})


def box_integral(form, lower, upper, nodes=16, periodic=()):
    """Integral over a coordinate box: Gauss-Legendre on ordinary axes, trapezoid on periodic ones"""
    axes, weights = [], []
    for j, (a, b) in enumerate(zip(lower, upper)):
        if j in periodic:
            x = a + (b - a) * np.arange(nodes) / nodes
            w = np.full(nodes, (b - a) / nodes)
        else:
            t, w = interval_rule(nodes)
            x, w = a + (b - a) * t, (b - a) * w
        axes.append(x)
        weights.append(w)
    grids = np.meshgrid(*axes, indexing='ij')
    points = np.stack([g.ravel() for g in grids], axis=-1)
    weight = np.ones(())
    for w in weights:
        weight = np.multiply.outer(weight, w)
    dim = len(lower)
    vectors = np.broadcast_to(np.eye(dim)[None], (points.shape[0], dim, dim))
    return float(np.sum(weight.ravel() * form.evaluate(None, points, vectors)))


def chern_weil_period(A, phi=None, nodes=16):
    """Period of the Chern-Weil form of ``abelian_flux`` over S^2 x S^2"""
    phi = phi or InvariantPolynomial()
    return box_integral(chern_weil_4form(A, phi), (0, 0, 0, 0), (np.pi, 2 * np.pi, np.pi, 2 * np.pi),
                        nodes, periodic=(1, 3))
