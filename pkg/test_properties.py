"""Randomized identities of the transfer operator, the scalar field and the dimension group."""
import random
from fractions import Fraction

from django.test import SimpleTestCase

from dynamics.dimension import GAElement, MarkovLimit, ga_equal, ga_state, markov_presentation
from dynamics.maps import build_map, hat_image_set, tent_map
from dynamics.markov import MarkovData, detect_markov, scaling_measure, uniformize
from dynamics.scalars import ONE, ZERO, Scalar
from dynamics.transfer import TransferContext, transfer_apply
from dynamics.xspace import StepFunction, step_integrate

SQRT2 = {"minpoly": [-2, 0, 1], "interval": ["1", "2"]}
GOLDEN = {"minpoly": [-1, -1, 1], "interval": ["1", "2"]}
SKEW_TENT = {
    "type": "explicit",
    "breakpoints": ["0", "1/3", "1"],
    "branches": [{"slope": "3", "intercept": "0"}, {"slope": "-3/2", "intercept": "3/2"}],
}

SAMPLES = 100


def corpus():
    return {
        "tent2": tent_map(2),
        "tent_sqrt2": build_map({"type": "tent", "s": SQRT2}),
        "beta_golden": build_map({"type": "beta", "beta": GOLDEN}),
        "skew_tent": build_map(SKEW_TENT),
        "tent_3_2": tent_map("3/2"),
    }


def pulled_back_points(tau, rng, count=10, depth=3):
    """Interior points whose orbit reaches a breakpoint or a partition point within ``depth`` steps."""
    seeds = set(tau.breakpoints)
    markov = detect_markov(tau, 64)
    if isinstance(markov, MarkovData):
        seeds.update(markov.points)
    seeds = sorted(seeds)
    points = set()
    for _ in range(20 * count):
        if len(points) >= count:
            break
        y = rng.choice(seeds)
        for _ in range(rng.randint(1, depth)):
            branches = [b for b in tau.branches if b.image.lo <= y <= b.image.hi]
            y = rng.choice(branches).inverse(y)
        if ZERO < y < ONE:
            points.add(y)
    return sorted(points)


def random_step(rng, points, low=-3, high=3):
    cuts = sorted(rng.sample(points, rng.randint(0, min(4, len(points)))))
    return StepFunction.build(cuts, [rng.randint(low, high) for _ in range(len(cuts) + 1)])


def random_rational(rng):
    return Fraction(rng.randint(-9, 9), rng.randint(1, 9))


def advance(A, v, k):
    for _ in range(k):
        v = tuple(sum(v[i] * A[i][j] for i in range(len(v))) for j in range(len(v)))
    return v


class TransferIdentityTests(SimpleTestCase):
    def test_integral_scales_by_s(self):
        for name, tau in corpus().items():
            rng = random.Random(f"integral-{name}")
            measure = scaling_measure(tau)
            ctx = TransferContext.of(tau)
            points = pulled_back_points(tau, rng)
            for _ in range(SAMPLES):
                f = random_step(rng, points)
                with self.subTest(map=name, f=f.describe()):
                    self.assertEqual(
                        step_integrate(transfer_apply(ctx, f), measure.weights),
                        measure.s * step_integrate(f, measure.weights),
                    )

    def test_support_of_the_image(self):
        for name, tau in corpus().items():
            rng = random.Random(f"support-{name}")
            ctx = TransferContext.of(tau)
            points = pulled_back_points(tau, rng)
            for _ in range(SAMPLES):
                f = random_step(rng, points, low=0)
                with self.subTest(map=name, f=f.describe()):
                    self.assertEqual(transfer_apply(ctx, f).support(), hat_image_set(tau, f.support()))

    def test_linearity(self):
        for name, tau in corpus().items():
            rng = random.Random(f"linear-{name}")
            ctx = TransferContext.of(tau)
            points = pulled_back_points(tau, rng)
            for _ in range(SAMPLES):
                f, g = random_step(rng, points), random_step(rng, points)
                a, b = random_rational(rng), random_rational(rng)
                with self.subTest(map=name, f=f.describe(), g=g.describe()):
                    self.assertEqual(
                        transfer_apply(ctx, f.scale(a) + g.scale(b)),
                        transfer_apply(ctx, f).scale(a) + transfer_apply(ctx, g).scale(b),
                    )


class FieldAxiomTests(SimpleTestCase):
    def elements(self, rng, root):
        return [Scalar(random_rational(rng)) + Scalar(random_rational(rng)) * root for _ in range(3)]

    def test_field_axioms(self):
        for name, literal in (("sqrt2", SQRT2), ("golden", GOLDEN)):
            rng = random.Random(f"field-{name}")
            root = Scalar.from_literal(literal)
            for _ in range(SAMPLES):
                a, b, c = self.elements(rng, root)
                with self.subTest(field=name, a=a.describe(), b=b.describe(), c=c.describe()):
                    self.assertEqual(a + b, b + a)
                    self.assertEqual(a * b, b * a)
                    self.assertEqual((a + b) + c, a + (b + c))
                    self.assertEqual((a * b) * c, a * (b * c))
                    self.assertEqual(a * (b + c), a * b + a * c)
                    self.assertEqual(a - a, ZERO)
                    self.assertEqual(a * ONE, a)
                    if a:
                        self.assertEqual(a * (ONE / a), ONE)
                    self.assertEqual((a * b).sign(), a.sign() * b.sign())
                    if a < b:
                        self.assertLess(a + c, b + c)


class DimensionGroupIdentityTests(SimpleTestCase):
    def presentations(self):
        phi = Scalar.from_literal(GOLDEN)
        return {
            "tent2": (markov_presentation(tent_map(2)), (1, -1)),
            "golden": (MarkovLimit(((1, 1), (1, 0)), (phi, ONE), phi), (0, 0)),
        }

    def related(self, rng, T, kernel, v, n):
        """An element equal to ``[v, n]`` by construction."""
        k = rng.randint(0, 3)
        w = advance(T.A, v, k)
        c = rng.randint(-2, 2)
        return GAElement(tuple(a + c * b for a, b in zip(w, kernel)), n + k)

    def test_equality_is_an_equivalence_relation(self):
        for name, (T, kernel) in self.presentations().items():
            rng = random.Random(f"ga-{name}")
            for _ in range(SAMPLES):
                v = tuple(rng.randint(-2, 2) for _ in range(2))
                n = rng.randint(0, 2)
                x = self.related(rng, T, kernel, v, n)
                y = self.related(rng, T, kernel, v, n)
                if rng.random() < 0.5:
                    z = self.related(rng, T, kernel, v, n)
                else:
                    z = GAElement(tuple(rng.randint(-2, 2) for _ in range(2)), rng.randint(0, 3))
                with self.subTest(presentation=name, x=x, y=y, z=z):
                    self.assertTrue(ga_equal(T, x, x))
                    self.assertTrue(ga_equal(T, x, y))
                    self.assertEqual(ga_equal(T, x, z), ga_equal(T, z, x))
                    self.assertEqual(ga_equal(T, y, z), ga_equal(T, x, z))

    def test_state_is_constant_on_classes(self):
        for name, (T, kernel) in self.presentations().items():
            rng = random.Random(f"state-{name}")
            for _ in range(SAMPLES):
                v = tuple(rng.randint(-2, 2) for _ in range(2))
                n = rng.randint(0, 2)
                x = GAElement(v, n)
                y = self.related(rng, T, kernel, v, n)
                with self.subTest(presentation=name, x=x, y=y):
                    self.assertEqual(ga_state(T, x), ga_state(T, y))


class UniformizationTests(SimpleTestCase):
    def test_conjugacy_holds_off_the_partition(self):
        tau = build_map(SKEW_TENT)
        measure = scaling_measure(tau)
        uniform = uniformize(tau, measure.weights, measure.s)
        rng = random.Random("uniformize")
        h = measure.weights.cdf
        for x in pulled_back_points(tau, rng, count=SAMPLES, depth=4):
            with self.subTest(x=x.describe()):
                self.assertEqual(h(tau.value(x)), uniform.value(h(x)))
