import math
import unittest

import numpy as np

import forgerynets
from forgerynets.datasets import Family
from forgerynets.errors import DataError
from forgerynets.utils.metrics import Metrics, accuracy, average_precision, compute_metrics, median_frame


class TestMetrics(unittest.TestCase):
    def test_average_precision(self):
        ap = average_precision([1, 0, 1], [0.9, 0.8, 0.3])
        self.assertAlmostEqual(ap, (1 + 2 / 3) / 2)

    def test_perfect_separation(self):
        y_true = np.random.choice(np.asarray([0, 1]), size=(500,))
        y_true[:2] = [0, 1]
        scores = np.where(y_true == 1, 0.9, 0.1)
        self.assertEqual(accuracy(y_true, scores), 1.0)
        self.assertEqual(average_precision(y_true, scores), 1.0)

    def test_constant_scores(self):
        y_true = [0, 1, 0, 1]
        scores = [0.5] * 4
        # ties at the threshold predict fake
        self.assertEqual(accuracy(y_true, scores), 0.5)
        self.assertEqual(average_precision(y_true, scores), 0.5)

    def test_no_positives(self):
        self.assertTrue(math.isnan(average_precision([0, 0], [0.2, 0.7])))

    def test_empty_raises(self):
        with self.assertRaises(DataError):
            accuracy([], [])
        with self.assertRaises(DataError):
            compute_metrics([], [])

    def test_length_mismatch_raises(self):
        with self.assertRaises(DataError):
            accuracy([0, 1], [0.5])

    def test_per_family(self):
        families = [Family.NONE, Family.NONE, Family.UP, Family.CB]
        y_true = [0, 0, 1, 1]
        scores = [0.1, 0.6, 0.9, 0.4]
        metrics = compute_metrics(y_true, scores, families=families)
        self.assertEqual(metrics.n_samples, 4)
        self.assertEqual(metrics.acc, 0.5)
        self.assertEqual(set(metrics.per_family), {'NONE', 'UP', 'CB'})
        self.assertEqual(metrics.per_family['NONE']['n'], 2)
        self.assertEqual(metrics.per_family['NONE']['acc'], 0.5)
        self.assertTrue(math.isnan(metrics.per_family['NONE']['ap']))
        self.assertAlmostEqual(metrics.per_family['UP']['acc'], 2 / 3)
        self.assertEqual(metrics.per_family['UP']['ap'], 1.0)
        self.assertAlmostEqual(metrics.per_family['CB']['acc'], 1 / 3)
        self.assertAlmostEqual(metrics.per_family['CB']['ap'], 0.5)

    def test_router_means(self):
        families = [Family.NONE, Family.UP, Family.UP]
        p = [[1., 0.], [0.2, 0.8], [0.4, 0.6]]
        metrics = compute_metrics([0, 1, 1], [0.2, 0.8, 0.7], families=families, p=p, streams=['image', 'npr'])
        np.testing.assert_allclose(metrics.router_mean['UP'], [0.3, 0.7])
        np.testing.assert_allclose(metrics.router_mean['NONE'], [1., 0.])
        df = metrics.to_frame()
        self.assertEqual(list(df.columns), ['family', 'n', 'acc', 'ap', 'p_image', 'p_npr'])
        self.assertEqual(list(df['family']), ['ALL', 'NONE', 'UP'])
        self.assertTrue(math.isnan(df.loc[0, 'p_image']))
        self.assertAlmostEqual(df.loc[2, 'p_npr'], 0.7)
        self.assertIn('ALL', metrics.to_text())

    def test_median_frame(self):
        frames = [
            Metrics(acc=acc, ap=1.0, n_samples=4, per_family={'UP': {'n': 2, 'acc': acc, 'ap': 1.0}}).to_frame()
            for acc in (0.5, 0.9, 0.7)
        ]
        df = median_frame(frames)
        self.assertEqual(list(df['family']), ['ALL', 'UP'])
        self.assertAlmostEqual(df.loc[0, 'acc'], 0.7)
        self.assertAlmostEqual(df.loc[1, 'acc'], 0.7)

    def test_exported_from_package(self):
        self.assertIs(forgerynets.utils.metrics.compute_metrics, compute_metrics)


if __name__ == '__main__':
    unittest.main()
