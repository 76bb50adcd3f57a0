import math
import unittest

import torch

from forgerynets.errors import ConfigurationError, DimensionError
from forgerynets.nets import ClassHeads, Router, bce_loss, entropy_loss, mixture_predict, route, total_loss


def tensor(values):
    return torch.tensor(values, dtype=torch.float64)


class TestRoute(unittest.TestCase):
    def test_zero_init_routes_uniformly(self):
        router = Router(n_streams=4, dim=8).double()
        p = router(torch.randn(5, 32, dtype=torch.float64))
        self.assertTrue(torch.allclose(p, torch.full((5, 4), 0.25, dtype=torch.float64)))

    def test_bias_dominates(self):
        f_cls = torch.zeros(8, dtype=torch.float64)
        W = torch.zeros(8, 4, dtype=torch.float64)
        p = route(f_cls, W, tensor([10., 0., 0., 0.]))
        self.assertEqual(tuple(p.shape), (4,))
        expected = math.exp(10) / (math.exp(10) + 3)
        self.assertAlmostEqual(p[0].item(), expected, places=12)
        self.assertAlmostEqual(p.sum().item(), 1., places=12)

    def test_contracts_on_random_inputs(self):
        generator = torch.Generator().manual_seed(1)
        W = torch.randn(12, 4, generator=generator, dtype=torch.float64)
        b = torch.randn(4, generator=generator, dtype=torch.float64)
        f_cls = torch.randn(1000, 12, generator=generator, dtype=torch.float64) * 3
        p = route(f_cls, W, b)
        self.assertLess((p.sum(dim=-1) - 1).abs().max().item(), 1e-6)
        per_head = torch.rand(1000, 4, generator=generator, dtype=torch.float64)
        fused = mixture_predict(p, per_head)
        self.assertTrue((fused >= per_head.min(dim=-1).values - 1e-12).all())
        self.assertTrue((fused <= per_head.max(dim=-1).values + 1e-12).all())
        entropies = torch.stack([entropy_loss(row) for row in p])
        self.assertGreaterEqual(entropies.min().item(), 0.)
        self.assertLessEqual(entropies.max().item(), math.log(4) + 1e-9)

    def test_feature_size_mismatch(self):
        with self.assertRaises(DimensionError):
            route(torch.zeros(2, 7), torch.zeros(8, 4), torch.zeros(4))


class TestMixture(unittest.TestCase):
    def test_convex_combination_bounds(self):
        generator = torch.Generator().manual_seed(0)
        p = torch.softmax(torch.randn(16, 3, generator=generator), dim=-1)
        per_head = torch.rand(16, 3, generator=generator)
        fused = mixture_predict(p, per_head)
        self.assertTrue((fused >= per_head.min(dim=-1).values - 1e-6).all())
        self.assertTrue((fused <= per_head.max(dim=-1).values + 1e-6).all())

    def test_one_hot_routing_picks_head(self):
        p = tensor([[0., 1., 0.]])
        per_head = tensor([[0.1, 0.7, 0.4]])
        self.assertAlmostEqual(mixture_predict(p, per_head).item(), 0.7)


class TestLosses(unittest.TestCase):
    def test_entropy(self):
        self.assertAlmostEqual(entropy_loss(tensor([0.25] * 4)).item(), math.log(4))
        self.assertEqual(entropy_loss(tensor([1., 0., 0., 0.])).item(), 0.)

    def test_entropy_is_batch_mean(self):
        p = tensor([[0.25] * 4, [1., 0., 0., 0.]])
        self.assertAlmostEqual(entropy_loss(p).item(), math.log(4) / 2)

    def test_bce(self):
        self.assertAlmostEqual(bce_loss(1., tensor([0.5])).item(), math.log(2))
        self.assertAlmostEqual(bce_loss(1., tensor([0.1])).item(), 2.302585, places=6)
        self.assertAlmostEqual(bce_loss(0., tensor([0.9])).item(), 2.302585, places=6)

    def test_bce_is_clamped(self):
        loss = bce_loss(tensor([1., 0.]), tensor([0., 1.]))
        self.assertTrue(math.isfinite(loss.item()))
        self.assertAlmostEqual(loss.item(), -math.log(1e-7), places=5)

    def test_total(self):
        p = tensor([[0.25] * 4])
        fused = tensor([0.5])
        self.assertAlmostEqual(total_loss(tensor([1.]), fused, p, lam=0.1).item(), 0.831777, places=6)
        self.assertAlmostEqual(total_loss(tensor([1.]), fused, p, lam=0.1, moe_sign='balance').item(),
                               0.554518, places=6)

    def test_zero_lambda_is_bce(self):
        p = tensor([[0.7, 0.2, 0.1]])
        fused = tensor([0.3])
        self.assertEqual(total_loss(tensor([0.]), fused, p, lam=0.).item(), bce_loss(tensor([0.]), fused).item())

    def test_bad_moe_sign(self):
        with self.assertRaises(ConfigurationError):
            total_loss(tensor([1.]), tensor([0.5]), tensor([[0.5, 0.5]]), moe_sign='minus')


class TestClassHeads(unittest.TestCase):
    def test_each_head_reads_its_stream(self):
        heads = ClassHeads(3, 4).double()
        cls = torch.randn(2, 3, 4, dtype=torch.float64)
        out = heads(cls)
        self.assertEqual(tuple(out.shape), (2, 3))
        expected = torch.sigmoid(heads[1](cls[:, 1])).squeeze(-1)
        self.assertTrue(torch.allclose(out[:, 1], expected))

    def test_wrong_stream_count(self):
        with self.assertRaises(DimensionError):
            ClassHeads(3, 4)(torch.zeros(2, 2, 4))


if __name__ == '__main__':
    unittest.main()
