"""the two simple fusion baselines: early fusion by addition of the inputs,
late fusion by a single head on concatenated per-modality features"""
import attr
import torch
import torch.nn as nn

from ..extractors import DEFAULT_SRM_KERNELS, ModalityExtractor
from .backbone import Backbone
from .detector import DEFAULT_KINDS, ForgeryDetector
from .router import Prediction

FUSED_STREAM = 'fused'


class EarlyFusionNet(nn.Module):
    """each stream passes through its own learnable 1x1 convolution, the results are summed
    into one plane, and a single-stream backbone with one LoRA expert per layer and one head classifies it
    """
    def __init__(self,
                 kinds=DEFAULT_KINDS,
                 image_size=32,
                 patch_size=4,
                 dim=32,
                 layers=4,
                 heads=4,
                 lora_rank=4,
                 lora_alpha=8.0,
                 base_seed=0,
                 npr_factor=2,
                 hpr_sigma=1.0,
                 srm_kernels=DEFAULT_SRM_KERNELS):
        super().__init__()
        self.extractor = ModalityExtractor(kinds, npr_factor=npr_factor, hpr_sigma=hpr_sigma,
                                           srm_kernels=srm_kernels)
        self.mix = nn.ModuleList([nn.Conv2d(3, 3, kernel_size=1) for _ in self.extractor.kinds])
        self.backbone = Backbone([FUSED_STREAM],
                                 image_size=image_size,
                                 patch_size=patch_size,
                                 dim=dim,
                                 layers=layers,
                                 heads=heads,
                                 lora_rank=lora_rank,
                                 lora_alpha=lora_alpha,
                                 fusion_layers=[],
                                 use_cross_attention=False,
                                 base_seed=base_seed)
        self.head = nn.Linear(dim, 1)
        self.streams = [FUSED_STREAM]

    @classmethod
    def from_config(cls, model_config):
        return cls(kinds=model_config.kinds,
                   image_size=model_config.image_size,
                   patch_size=model_config.patch_size,
                   dim=model_config.embed_dim,
                   layers=model_config.layers,
                   heads=model_config.heads,
                   lora_rank=model_config.lora_rank,
                   lora_alpha=model_config.lora_alpha,
                   base_seed=model_config.base_seed,
                   npr_factor=model_config.npr_factor,
                   hpr_sigma=model_config.hpr_sigma,
                   srm_kernels=model_config.srm_kernels)

    def fuse_planes(self, planes):
        """(B, M+1, 3, H, W) -> (B, 3, H, W), summed in stream order"""
        fused = self.mix[0](planes[:, 0])
        for j in range(1, len(self.mix)):
            fused = fused + self.mix[j](planes[:, j])
        return fused

    def forward_planes(self, planes):
        tokens = self.backbone.forward_stream(self.fuse_planes(planes), FUSED_STREAM)
        cls = tokens[:, :1]
        fused = torch.sigmoid(self.head(cls[:, 0])).squeeze(-1)
        batch = planes.shape[0]
        return Prediction(p=torch.ones(batch, 1, dtype=fused.dtype, device=fused.device),
                          per_head=fused.unsqueeze(-1),
                          fused=fused,
                          argmax_modality=torch.zeros(batch, dtype=torch.int64, device=fused.device),
                          cls=cls)

    def forward(self, img):
        return self.forward_planes(self.extractor(img))

    def set_trainable(self):
        """everything except the frozen base trains"""
        self.requires_grad_(True)
        self.backbone.base.requires_grad_(False)
        return [name for name, param in self.named_parameters() if param.requires_grad]


def late_fusion_config(model_config):
    """the model configuration of the late-fusion baseline:
    no cross attention, no adapter, and a shared head instead of routing"""
    return attr.evolve(model_config, use_cross_attention=False, use_adapter=False, use_router=False)


def late_fusion_detector(model_config):
    return ForgeryDetector.from_config(late_fusion_config(model_config))


def freeze_for_late_fusion(model):
    """freeze everything except the shared head

    Returns
    -------
    names : list
        of trainable parameter names
    """
    model.requires_grad_(False)
    model.shared_head.requires_grad_(True)
    return [name for name, param in model.named_parameters() if param.requires_grad]
