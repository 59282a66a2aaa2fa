"""
Тесты точного инновационного представления: F − θP, обобщённая обратная,
innovate/recover на марковской цепи и гауссовском AR(1)
"""
import sys
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

import numpy as np
from scipy import stats

import config
from services.continuous import (
    ConditionalModel,
    GaussianCdf,
    PiecewiseCdf,
    ScipyCdf,
    bernoulli_cdf,
    from_uniform,
    innovate,
    recover,
    shaping_cdf_from_json,
    to_uniform,
    uniform_cdf,
)
from services.distributions import make_rng
from services.errors import ValidationError


def markov_flip_chain(n: int, flip: float, seed: int) -> np.ndarray:
    """Симметричная двоичная цепь: состояние меняется с вероятностью flip."""
    rng = make_rng(seed)
    flips = rng.random(n) < flip
    start = float(rng.random() < 0.5)
    return (start + np.cumsum(np.concatenate([[0], flips[1:]]))) % 2


def markov_flip_model(flip: float) -> ConditionalModel:
    return ConditionalModel(
        initial=bernoulli_cdf(0.5),
        table={(0.0,): bernoulli_cdf(1.0 - flip), (1.0,): bernoulli_cdf(flip)},
        order=1,
    )


def ar1_model(coefficient: float) -> ConditionalModel:
    stationary = GaussianCdf(0.0, 1.0 / np.sqrt(1.0 - coefficient**2))

    def kernel(history):
        return GaussianCdf(coefficient * history[0], 1.0) if history else stationary

    return ConditionalModel(order=1, kernel=kernel)


def lag1_correlation(values: np.ndarray) -> float:
    return float(np.corrcoef(values[:-1], values[1:])[0, 1])


class TestShapingCdf(unittest.TestCase):
    """Тесты F, обобщённой обратной и атомов"""

    def test_to_uniform_examples(self):
        """Равномерный закон — тождество, на атоме вычитается θ·P(x)"""
        self.assertAlmostEqual(to_uniform(0.37, uniform_cdf(), 0.9), 0.37, places=15)
        self.assertAlmostEqual(to_uniform(0.0, bernoulli_cdf(0.3), 0.5), 0.15, places=15)
        self.assertAlmostEqual(to_uniform(1.0, bernoulli_cdf(0.3), 0.0), 1.0, places=15)

    def test_from_uniform_examples(self):
        """Квантиль равномерного, бернуллиевского и показательного законов"""
        cases = [
            (uniform_cdf(), 0.8, 0.8),
            (bernoulli_cdf(0.3), 0.15, 0.0),
            (bernoulli_cdf(0.3), 0.3, 0.0),
            (bernoulli_cdf(0.3), 0.31, 1.0),
            (ScipyCdf("expon"), 0.5, np.log(2.0)),
        ]
        for law, u, expected in cases:
            with self.subTest(law=repr(law), u=u):
                self.assertAlmostEqual(from_uniform(u, law), expected, places=12)

    def test_mixed_law_quantile(self):
        """Смешанный закон: непрерывная часть на [0, 1] массы 0.5 и атом 0.5 в точке 2"""
        law = PiecewiseCdf(knots=[(0.0, 0.0), (1.0, 0.5)], atoms=[(2.0, 0.5)])
        self.assertAlmostEqual(float(law.cdf(0.5)), 0.25, places=15)
        self.assertAlmostEqual(float(law.cdf(2.0)), 1.0, places=15)
        self.assertAlmostEqual(float(law.mass(2.0)), 0.5, places=15)
        self.assertAlmostEqual(from_uniform(0.25, law), 0.5, places=12)
        self.assertEqual(from_uniform(0.75, law), 2.0)
        self.assertTrue(law.has_atoms)

    def test_invalid_inputs(self):
        """Значения вне носителя, θ и u вне [0, 1] отклоняются"""
        with self.assertRaises(ValidationError):
            to_uniform(1.5, uniform_cdf(), 0.5)
        with self.assertRaises(ValidationError):
            to_uniform(0.5, uniform_cdf(), 1.5)
        with self.assertRaises(ValidationError):
            from_uniform(1.2, uniform_cdf())
        with self.assertRaises(ValidationError):
            PiecewiseCdf(atoms=[(0.0, 0.3), (1.0, 0.3)])
        with self.assertRaises(ValidationError):
            ScipyCdf("no_such_family")

    def test_json_forms(self):
        """Законы восстанавливаются из своей JSON-формы"""
        laws = [bernoulli_cdf(0.3), uniform_cdf(-1.0, 1.0), ScipyCdf("expon", {"scale": 2.0}), GaussianCdf(1.0, 2.0)]
        grid = np.linspace(-2.0, 3.0, 11)
        for law in laws:
            with self.subTest(law=repr(law)):
                restored = shaping_cdf_from_json(law.to_json())
                np.testing.assert_allclose(restored.cdf(grid), law.cdf(grid), atol=1e-15)

    def test_probability_integral_transform(self):
        """F(X) для X ∼ Exp(1) проходит тест Колмогорова — Смирнова на равномерность"""
        rng = make_rng(11)
        law = ScipyCdf("expon")
        x = rng.exponential(size=config.MONTE_CARLO_SAMPLES)
        u = to_uniform(x, law, rng.random(x.size))
        self.assertGreater(stats.kstest(u, "uniform").pvalue, config.SIGNIFICANCE)

    def test_randomized_transform_on_atoms(self):
        """F(X) − θP(X) равномерна и для чисто атомарного закона"""
        rng = make_rng(12)
        x = (rng.random(config.MONTE_CARLO_SAMPLES) >= 0.3).astype(float)
        u = to_uniform(x, bernoulli_cdf(0.3), rng.random(x.size))
        self.assertGreater(stats.kstest(u, "uniform").pvalue, config.SIGNIFICANCE)


class TestConditionalModel(unittest.TestCase):
    """Тесты разрешения истории"""

    def test_resolve(self):
        """Короткая история — initial, иначе табличный закон"""
        model = markov_flip_model(0.3)
        self.assertIs(model.resolve([]), model.initial)
        self.assertIs(model.resolve([1.0, 0.0]), model.table[(0.0,)])
        with self.assertRaises(ValidationError):
            model.resolve([0.5])

    def test_json_form(self):
        """Табличная модель сохраняется и читается из JSON"""
        model = markov_flip_model(0.3)
        restored = ConditionalModel.from_json(model.to_json())
        self.assertEqual(restored.order, 1)
        self.assertEqual(set(restored.table), {(0.0,), (1.0,)})
        self.assertAlmostEqual(float(restored.resolve([1.0]).cdf(0.0)), 0.3, places=15)

    def test_memoryless_from_single_law(self):
        model = ConditionalModel.from_json({"kind": "gaussian", "loc": 0.0, "scale": 1.0})
        self.assertEqual(model.order, 0)
        self.assertFalse(model.has_atoms)


class TestInnovateRecover(unittest.TestCase):
    """Тесты прямого и обратного прохода"""

    def test_identity_on_uniform_input(self):
        """Равномерный вход, тождественная модель, равномерная цель — выход равен входу"""
        x = make_rng(1).random(1000)
        model = ConditionalModel.memoryless(uniform_cdf())
        result = innovate(x, model, uniform_cdf(), seed=5)
        np.testing.assert_allclose(result.ys, x, atol=1e-15)
        self.assertFalse(result.has_atoms)
        np.testing.assert_allclose(recover(result.ys, model, uniform_cdf(), None), x, atol=1e-12)

    def test_continuous_round_trip(self):
        """Строго возрастающая модель: восстановление с точностью 1e-12"""
        x = make_rng(2).exponential(size=2000)
        model = ConditionalModel.memoryless(ScipyCdf("expon"))
        result = innovate(x, model, GaussianCdf(), seed=3)
        np.testing.assert_allclose(recover(result.ys, model, GaussianCdf(), result.thetas), x, rtol=1e-9, atol=1e-12)

    def test_bernoulli_round_trip(self):
        """Атомарная модель с записанными θ: точное восстановление символов"""
        x = (make_rng(3).random(5000) >= 0.3).astype(float)
        model = ConditionalModel.memoryless(bernoulli_cdf(0.3))
        result = innovate(x, model, uniform_cdf(), seed=4)
        self.assertTrue(result.has_atoms)
        np.testing.assert_array_equal(recover(result.ys, model, uniform_cdf(), result.thetas), x)

    def test_markov_chain_innovations(self):
        """Цепь с вероятностью смены 0.3: точный обратный проход, независимость и равномерность выхода"""
        x = markov_flip_chain(config.MONTE_CARLO_SAMPLES, 0.3, seed=21)
        model = markov_flip_model(0.3)
        self.assertGreater(abs(lag1_correlation(x)), 0.3)

        result = innovate(x, model, uniform_cdf(), seed=22)
        np.testing.assert_array_equal(recover(result.ys, model, uniform_cdf(), result.thetas), x)

        y = result.ys
        self.assertLess(abs(lag1_correlation(y)), 0.01)
        self.assertGreater(stats.kstest(y, "uniform").pvalue, config.SIGNIFICANCE)

        # однородность переходов: таблица (ячейка Y_{k-1}, ячейка Y_k) по квартилям
        cells = np.minimum((y * 4).astype(int), 3)
        counts = np.zeros((4, 4))
        np.add.at(counts, (cells[:-1], cells[1:]), 1)
        self.assertGreater(stats.chi2_contingency(counts).pvalue, config.SIGNIFICANCE)

    def test_ar1_innovations(self):
        """Гауссовский AR(1) с коэффициентом 0.8: выход N(0, 1) без корреляции"""
        n = config.MONTE_CARLO_SAMPLES
        rng = make_rng(31)
        x = np.empty(n)
        x[0] = rng.normal(0.0, 1.0 / 0.6)
        noise = rng.normal(size=n)
        for k in range(1, n):
            x[k] = 0.8 * x[k - 1] + noise[k]
        model = ar1_model(0.8)

        result = innovate(x, model, GaussianCdf(), seed=32)
        y = result.ys
        self.assertLess(abs(y.mean()), 3.0 / np.sqrt(n))
        self.assertLess(abs(y.var() - 1.0), 3.0 * np.sqrt(2.0 / n))
        self.assertLess(abs(lag1_correlation(y)), 0.01)
        np.testing.assert_allclose(recover(y, model, GaussianCdf(), result.thetas), x, atol=1e-8)

    def test_seed_determinism(self):
        """Одинаковый seed — одинаковые θ и выходы"""
        x = markov_flip_chain(500, 0.3, seed=5)
        model = markov_flip_model(0.3)
        a = innovate(x, model, uniform_cdf(), seed=9)
        b = innovate(x, model, uniform_cdf(), seed=9)
        np.testing.assert_array_equal(a.ys, b.ys)
        np.testing.assert_array_equal(a.thetas, b.thetas)

    def test_recover_errors(self):
        """Несовпадение длин, отсутствие θ при атомах и атомарная цель отклоняются"""
        model = ConditionalModel.memoryless(bernoulli_cdf(0.3))
        with self.assertRaises(ValidationError):
            recover([0.1, 0.2], model, uniform_cdf(), [0.5])
        with self.assertRaises(ValidationError):
            recover([0.1, 0.2], model, uniform_cdf(), None)
        with self.assertRaises(ValidationError):
            recover([0.0], model, bernoulli_cdf(0.5), [0.5])


if __name__ == "__main__":
    unittest.main(verbosity=2)
