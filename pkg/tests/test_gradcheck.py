import unittest

from forgerynets.errors import ConfigurationError, NumericalError
from forgerynets.gradcheck import TOLERANCE, gradcheck, model_check, op_checks


class TestGradcheck(unittest.TestCase):
    def test_primitives(self):
        for seed in (0, 1):
            errors = op_checks(seed=seed)
            self.assertEqual(set(errors), {'matmul', 'softmax', 'layer_norm', 'attention',
                                           'multi_head_attention', 'conv2d', 'router_entropy'})
            for name, error in errors.items():
                self.assertLess(error, TOLERANCE, msg=f'{name}, seed {seed}')

    def test_tiny_detector(self):
        for seed in (0, 1, 2):
            with self.subTest(seed=seed):
                self.assertLess(model_check('tiny', seed=seed), TOLERANCE)

    def test_sampled_points(self):
        df = gradcheck('tiny', seed=1, n_points=5)
        self.assertEqual(list(df.columns), ['check', 'max_rel_err'])
        self.assertEqual(df['check'].iloc[-1], 'detector_tiny')
        self.assertTrue((df['max_rel_err'] < TOLERANCE).all())

    def test_tolerance_is_enforced(self):
        with self.assertRaises(NumericalError):
            gradcheck('tiny', n_points=3, tolerance=0.)

    def test_bad_dims(self):
        with self.assertRaises(ConfigurationError):
            model_check('huge')


if __name__ == '__main__':
    unittest.main()
