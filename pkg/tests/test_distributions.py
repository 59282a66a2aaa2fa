"""
Unit-тесты для services/distributions.py: Pmf, энтропии, взаимная информация, seed
"""
import sys
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from services.distributions import (
    Pmf,
    binary_entropy,
    conditional_entropy,
    entropy,
    make_rng,
    mutual_information,
)
from services.errors import ValidationError


def _pmf_vectors(min_size=1, max_size=6):
    weights = st.lists(st.integers(0, 100), min_size=min_size, max_size=max_size)
    return weights.filter(lambda w: sum(w) > 0).map(lambda w: np.asarray(w) / sum(w))


def _joints(max_rows=4, max_cols=4):
    return st.tuples(st.integers(1, max_rows), st.integers(1, max_cols)).flatmap(
        lambda shape: st.lists(
            st.integers(0, 100), min_size=shape[0] * shape[1], max_size=shape[0] * shape[1]
        )
        .filter(lambda w: sum(w) > 0)
        .map(lambda w: (np.asarray(w) / sum(w)).reshape(shape))
    )


class TestPmf(unittest.TestCase):
    """Тесты построения и проверки Pmf"""

    def test_normalizes_within_tolerance(self):
        """Сумма, отличающаяся от 1 на доли допуска, нормируется"""
        pmf = Pmf.from_masses([0.5, 0.5 + 1e-10])
        self.assertAlmostEqual(sum(pmf.masses), 1.0, places=15)

    def test_rejects_bad_masses(self):
        """Отрицательные, нечисловые и ненормированные массы отклоняются"""
        cases = [
            ([0.5, 0.6], "сумма больше 1"),
            ([-0.1, 1.1], "отрицательная масса"),
            ([float("nan"), 1.0], "NaN"),
            ([], "пустой вектор"),
        ]
        for masses, reason in cases:
            with self.subTest(reason=reason):
                with self.assertRaises(ValidationError):
                    Pmf.from_masses(masses)

    def test_constructor_checks_masses(self):
        """Прямой конструктор Pmf проверяет массы так же, как from_masses"""
        cases = [
            ((0.7, 0.7), "сумма 1.4"),
            ((-0.5, 1.5), "отрицательная масса"),
            ((float("inf"), 0.0), "бесконечность"),
        ]
        for masses, reason in cases:
            with self.subTest(reason=reason):
                with self.assertRaises(ValidationError):
                    Pmf(masses=masses)
        self.assertEqual(Pmf(masses=(0.25, 0.75)).cardinality, 2)

    def test_entropy_rejects_invalid_vectors(self):
        """entropy не принимает векторы, не являющиеся распределением"""
        cases = [
            ([-0.5, 1.5], "отрицательная масса"),
            ([0.7, 0.7], "сумма 1.4"),
            ([0.5, float("nan")], "NaN"),
        ]
        for masses, reason in cases:
            with self.subTest(reason=reason):
                with self.assertRaises(ValidationError):
                    entropy(masses)

    def test_padding_keeps_masses(self):
        """Дополнение нулями не меняет массы и энтропию"""
        pmf = Pmf.from_masses([0.2, 0.8], labels=["a", "b"])
        padded = pmf.padded(4)
        self.assertEqual(padded.cardinality, 4)
        self.assertEqual(padded.masses[2:], (0.0, 0.0))
        self.assertEqual(padded.label(1), "b")
        self.assertAlmostEqual(entropy(padded), entropy(pmf), places=15)
        with self.assertRaises(ValidationError):
            pmf.padded(1)

    def test_json_form(self):
        """JSON-форма содержит массы и метки"""
        pmf = Pmf.from_json({"masses": [0.25, 0.75], "labels": ["x", "y"]})
        self.assertEqual(pmf.to_json(), {"masses": [0.25, 0.75], "labels": ["x", "y"]})
        with self.assertRaises(ValidationError):
            Pmf.from_json({"probabilities": [1.0]})


class TestEntropy(unittest.TestCase):
    """Тесты энтропий и взаимной информации"""

    def test_known_values(self):
        """Значения энтропии на известных законах"""
        cases = [
            ((0.5, 0.5), 1.0),
            ((1.0,), 0.0),
            ((0.6, 0.3, 0.1), 1.29546),
            ((0.25, 0.25, 0.25, 0.25), 2.0),
        ]
        for masses, expected in cases:
            with self.subTest(masses=masses):
                self.assertAlmostEqual(entropy(masses), expected, places=5)

    def test_binary_entropy(self):
        """h(p) на границах, в центре и в точке 0.15"""
        self.assertEqual(binary_entropy(0.0), 0.0)
        self.assertEqual(binary_entropy(1.0), 0.0)
        self.assertAlmostEqual(binary_entropy(0.5), 1.0, places=15)
        self.assertAlmostEqual(binary_entropy(0.15), 0.60984, places=5)
        for bad in (-0.01, 1.01):
            with self.subTest(p=bad):
                with self.assertRaises(ValidationError):
                    binary_entropy(bad)

    def test_mutual_information_examples(self):
        """I на диагонали, на произведении маргиналов и на связке без потерь"""
        self.assertAlmostEqual(mutual_information([[0.5, 0.0], [0.0, 0.5]]), 1.0, places=12)
        product = np.outer([0.3, 0.7], [0.4, 0.6])
        self.assertAlmostEqual(mutual_information(product), 0.0, places=12)

        # X — двоичный источник (0.2, 0.8), Y — три выходных символа связки
        joint = np.array([[0.2, 0.0, 0.0], [0.0, 0.25, 0.55]])
        self.assertAlmostEqual(mutual_information(joint), entropy([0.2, 0.8]), places=12)
        self.assertAlmostEqual(conditional_entropy(joint, given_axis=1), 0.0, places=12)

    def test_invalid_joint(self):
        """Совместный закон с отрицательной массой или суммой ≠ 1 отклоняется"""
        for joint in ([[0.5, 0.6]], [[-0.5, 1.5]], [1.0]):
            with self.subTest(joint=joint):
                with self.assertRaises(ValidationError):
                    mutual_information(joint)

    @settings(max_examples=200, deadline=None)
    @given(_pmf_vectors(), st.randoms(use_true_random=False))
    def test_entropy_permutation_invariant(self, masses, rnd):
        """Энтропия не зависит от порядка масс и лежит в [0, log2 n]"""
        shuffled = list(masses)
        rnd.shuffle(shuffled)
        self.assertAlmostEqual(entropy(masses), entropy(shuffled), places=12)
        self.assertGreaterEqual(entropy(masses), 0.0)
        self.assertLessEqual(entropy(masses), np.log2(len(masses)) + 1e-12)

    @settings(max_examples=200, deadline=None)
    @given(_joints())
    def test_mutual_information_identity(self, joint):
        """I(X;Y) = H(X) + H(Y) − H(X,Y)"""
        expected = entropy(joint.sum(axis=1)) + entropy(joint.sum(axis=0)) - entropy(joint.ravel())
        self.assertAlmostEqual(mutual_information(joint), max(expected, 0.0), places=12)


class TestRng(unittest.TestCase):
    """Тесты детерминированного генератора"""

    def test_same_seed_same_stream(self):
        """Одинаковые seed дают одинаковые потоки"""
        a = make_rng(42).random(10)
        b = make_rng(42).random(10)
        c = make_rng(43).random(10)
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, c))

    def test_seed_range(self):
        """seed вне [0, 2^64) отклоняется"""
        make_rng(2**64 - 1)
        for bad in (-1, 2**64, 1.5):
            with self.subTest(seed=bad):
                with self.assertRaises(ValidationError):
                    make_rng(bad)


if __name__ == "__main__":
    unittest.main(verbosity=2)
