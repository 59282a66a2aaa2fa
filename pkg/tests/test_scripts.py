"""
Тесты скриптов экспериментов на малых размерах
"""
import sys
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from scripts.causal_benchmark import run_benchmark
from scripts.sandwich_gap_report import build_report


class TestSandwichGapReport(unittest.TestCase):
    def test_report_ordering(self):
        """bound ≤ exact ≤ greedy в каждой строке отчёта"""
        frame = build_report(8, seed=5, sources=(2, 3), symbols=(2, 3))
        self.assertEqual(len(frame), 8)
        self.assertTrue(((frame["bound"] <= frame["exact"] + 1e-9) & (frame["exact"] <= frame["greedy"] + 1e-9)).all())
        self.assertTrue((frame["gap"] >= -1e-9).all())


class TestCausalBenchmark(unittest.TestCase):
    def test_counts_every_trial(self):
        outcomes = run_benchmark(5, 2000, seed=11)
        self.assertEqual(sum(outcomes.values()), 5)
        self.assertTrue(set(outcomes) <= {"X→Y", "Y→X", "undecided"})


if __name__ == "__main__":
    unittest.main(verbosity=2)
