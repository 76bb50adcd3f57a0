from collections import OrderedDict
import os
import shutil
import struct
import tempfile
import unittest

import torch

from forgerynets.checkpoint import (
    decode_checkpoint,
    encode_checkpoint,
    load_checkpoint,
    load_into,
    load_model,
    save_checkpoint,
    save_model,
    select,
)
from forgerynets.errors import ConfigurationError, FormatError
from forgerynets.nets import ForgeryDetector

TINY = dict(kinds=('image', 'srm', 'npr'), image_size=16, patch_size=8, dim=8, layers=2, heads=4,
            lora_rank=2, lora_alpha=4., adapter_channels=(4, 8))


class TestCheckpoint(unittest.TestCase):
    def setUp(self):
        self.tmp_dir = tempfile.mkdtemp()
        self.path = os.path.join(self.tmp_dir, 'model.ckpt')

    def tearDown(self):
        shutil.rmtree(self.tmp_dir)

    def test_round_trip_is_bitwise(self):
        state = OrderedDict([
            ('w', torch.randn(3, 4)),
            ('d', torch.randn(2, dtype=torch.float64)),
            ('count', torch.tensor(7)),
            ('scalar', torch.tensor(0.5)),
        ])
        decoded = decode_checkpoint(encode_checkpoint(state))
        self.assertEqual(list(decoded), list(state))
        for name, tensor in state.items():
            self.assertEqual(decoded[name].dtype, tensor.dtype, msg=name)
            self.assertTrue(torch.equal(decoded[name], tensor), msg=name)

    def test_header(self):
        buf = encode_checkpoint(OrderedDict([('x', torch.zeros(2))]))
        magic, version, count = struct.unpack_from('<4sHI', buf)
        self.assertEqual((magic, version, count), (b'ALEI', 1, 1))
        # header + name length + name + dtype, rank + one dim + payload
        self.assertEqual(len(buf), 10 + 2 + 1 + 2 + 4 + 8)

    def test_unsupported_dtype(self):
        with self.assertRaises(ConfigurationError):
            encode_checkpoint({'x': torch.zeros(2, dtype=torch.int8)})

    def test_bad_magic(self):
        with self.assertRaises(FormatError) as cm:
            decode_checkpoint(b'ALDS' + bytes(6))
        self.assertEqual(cm.exception.offset, 0)

    def test_truncated(self):
        buf = encode_checkpoint(OrderedDict([('x', torch.zeros(4)), ('y', torch.ones(2))]))
        for size in (len(buf) - 1, 12, 5):
            with self.assertRaises(FormatError):
                decode_checkpoint(buf[:size])

    def test_unknown_dtype_code(self):
        buf = bytearray(encode_checkpoint(OrderedDict([('x', torch.zeros(1))])))
        buf[10 + 2 + 1] = 9
        with self.assertRaises(FormatError) as cm:
            decode_checkpoint(bytes(buf))
        self.assertEqual(cm.exception.offset, 13)

    def test_saving_twice_gives_identical_bytes(self):
        model = ForgeryDetector(**TINY)
        other = os.path.join(self.tmp_dir, 'again.ckpt')
        save_model(model, self.path)
        save_model(model, other)
        with open(self.path, 'rb') as a, open(other, 'rb') as b:
            self.assertEqual(a.read(), b.read())

    def test_model_round_trip(self):
        model = ForgeryDetector(**TINY)
        with torch.no_grad():
            for param in model.parameters():
                param.normal_()
        save_model(model, self.path)
        restored = load_model(ForgeryDetector(**TINY), self.path)
        for (name, a), (_, b) in zip(model.state_dict().items(), restored.state_dict().items()):
            self.assertTrue(torch.equal(a, b), msg=name)

    def test_prefixes(self):
        model = ForgeryDetector(**TINY)
        prefixes = model.fragment_prefixes('npr')
        save_model(model, self.path, prefixes=prefixes)
        state = load_checkpoint(self.path)
        self.assertTrue(state)
        self.assertTrue(all(name.startswith(prefixes) for name in state))
        self.assertEqual(list(select(model.state_dict(), prefixes)), list(state))
        with self.assertRaises(ConfigurationError):
            load_into(ForgeryDetector(**TINY), state, strict=True)
        load_into(ForgeryDetector(**TINY), state, strict=False)

    def test_unknown_entry(self):
        save_checkpoint(self.path, OrderedDict([('nope.weight', torch.zeros(2))]))
        with self.assertRaises(ConfigurationError) as cm:
            load_model(ForgeryDetector(**TINY), self.path, strict=False)
        self.assertIn('nope.weight', str(cm.exception))

    def test_shape_mismatch(self):
        model = ForgeryDetector(**TINY)
        state = OrderedDict([('router.b', torch.zeros(5))])
        with self.assertRaises(ConfigurationError):
            load_into(model, state, strict=False)

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            load_checkpoint(os.path.join(self.tmp_dir, 'nope.ckpt'))


if __name__ == '__main__':
    unittest.main()
