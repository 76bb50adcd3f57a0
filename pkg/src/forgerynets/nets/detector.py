"""the full detector: extractors, multi-stream backbone, low-level adapter and routed heads"""
import logging

import torch
import torch.nn as nn

from ..errors import ConfigurationError
from ..extractors import DEFAULT_SRM_KERNELS, ExtractorKind, ModalityExtractor
from .adapter import LowLevelAdapter
from .backbone import Backbone
from .router import ClassHeads, Prediction, Router, mixture_predict

logger = logging.getLogger(__name__)

DEFAULT_KINDS = ('image', 'srm', 'npr', 'bayar')

# phase-1 target that trains the adapter's low-level encoder instead of a stream
ENCODER = 'encoder'


class ForgeryDetector(nn.Module):
    """detects forged images from an RGB stream plus low-level information streams

    Parameters
    ----------
    kinds : list
        of str or ExtractorKind, IMAGE exactly once plus M distinct low-level kinds.
        Their order is the order of the modality axis.
    image_size : int
    patch_size : int
    dim : int
    layers : int
    heads : int
    lora_rank : int
    lora_alpha : float
    fusion_layers : list
        default is None, one quarter, one half, three quarters and the final layer
    adapter_channels : tuple
        widths of the two conv blocks of the low-level encoder
    use_lora : bool
        LoRA experts on the QKV projections. If False the deltas are skipped.
    use_cross_attention : bool
        gated attention across streams at the fusion layers
    use_adapter : bool
        low-level adapter. If False, no ``adapter.*`` parameters exist.
    use_router : bool
        routed mixture of per-modality heads. If False, routing is uniform
        and one shared head reads the concatenated CLS tokens.
    per_modality_gate : bool
    base_seed : int
    npr_factor : int
    hpr_sigma : float
    srm_kernels : tuple
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
                 fusion_layers=None,
                 adapter_channels=(16, 32),
                 use_lora=True,
                 use_cross_attention=True,
                 use_adapter=True,
                 use_router=True,
                 per_modality_gate=False,
                 base_seed=0,
                 npr_factor=2,
                 hpr_sigma=1.0,
                 srm_kernels=DEFAULT_SRM_KERNELS):
        super().__init__()
        self.extractor = ModalityExtractor(kinds, npr_factor=npr_factor, hpr_sigma=hpr_sigma,
                                           srm_kernels=srm_kernels)
        self.kinds = self.extractor.kinds
        self.streams = [kind.value for kind in self.kinds]
        n_streams = len(self.streams)
        self.lowlevel = [j for j, kind in enumerate(self.kinds) if kind is not ExtractorKind.IMAGE]

        self.backbone = Backbone(self.streams,
                                 image_size=image_size,
                                 patch_size=patch_size,
                                 dim=dim,
                                 layers=layers,
                                 heads=heads,
                                 lora_rank=lora_rank,
                                 lora_alpha=lora_alpha,
                                 fusion_layers=fusion_layers,
                                 use_lora=use_lora,
                                 use_cross_attention=use_cross_attention,
                                 per_modality_gate=per_modality_gate,
                                 base_seed=base_seed)

        if use_adapter and self.lowlevel:
            self.adapter = LowLevelAdapter(len(self.lowlevel), dim, heads, self.backbone.fusion_layers,
                                           channels=tuple(adapter_channels))
        else:
            if use_adapter:
                logger.warning('no low-level kinds configured, building the detector without an adapter')
            self.adapter = None

        # per-modality heads always exist, phase 1 trains them
        self.heads = ClassHeads(n_streams, dim)
        if use_router:
            self.router = Router(n_streams, dim)
            self.shared_head = None
        else:
            self.router = None
            self.shared_head = nn.Linear(n_streams * dim, 1)

        self.use_lora = use_lora
        self.use_cross_attention = use_cross_attention
        self.use_adapter = self.adapter is not None
        self.use_router = use_router

    @classmethod
    def from_config(cls, model_config):
        """build from a ``forgerynets.config.ModelConfig``"""
        return cls(kinds=model_config.kinds,
                   image_size=model_config.image_size,
                   patch_size=model_config.patch_size,
                   dim=model_config.embed_dim,
                   layers=model_config.layers,
                   heads=model_config.heads,
                   lora_rank=model_config.lora_rank,
                   lora_alpha=model_config.lora_alpha,
                   fusion_layers=model_config.fusion_layers,
                   adapter_channels=model_config.adapter_channels,
                   use_lora=model_config.use_lora,
                   use_cross_attention=model_config.use_cross_attention,
                   use_adapter=model_config.use_adapter,
                   use_router=model_config.use_router,
                   per_modality_gate=model_config.per_modality_gate,
                   base_seed=model_config.base_seed,
                   npr_factor=model_config.npr_factor,
                   hpr_sigma=model_config.hpr_sigma,
                   srm_kernels=model_config.srm_kernels)

    @property
    def n_streams(self):
        return len(self.streams)

    def stream_index(self, modality):
        return self.extractor.index(modality)

    def encode_prior(self, planes):
        """G_0 from the low-level planes of a (B, M+1, 3, H, W) stack"""
        return self.adapter.encode(planes[:, self.lowlevel])

    def forward_planes(self, planes):
        """full pass from already standardized planes (B, M+1, 3, H, W)"""
        g = self.encode_prior(planes) if self.adapter is not None else None
        _, cls = self.backbone(planes, adapter=self.adapter, g=g)
        return self.predict(cls)

    def forward(self, img):
        """img : (B, 3, H, W) RGB in [0, 1] -> Prediction"""
        return self.forward_planes(self.extractor(img))

    def predict(self, cls):
        """routed mixture of head probabilities from CLS tokens (B, M+1, D)"""
        f_cls = cls.reshape(cls.shape[0], -1)
        if self.router is not None:
            p = self.router(f_cls)
            per_head = self.heads(cls)
            fused = mixture_predict(p, per_head)
        else:
            p = torch.full((cls.shape[0], self.n_streams), 1. / self.n_streams, dtype=cls.dtype, device=cls.device)
            fused = torch.sigmoid(self.shared_head(f_cls)).squeeze(-1)
            per_head = fused.unsqueeze(-1).expand(-1, self.n_streams)
        return Prediction(p=p, per_head=per_head, fused=fused, argmax_modality=p.argmax(dim=-1), cls=cls)

    def predict_single(self, img, modality):
        """Prediction of a single stream through its own head, no fusion.
        Routing is trivially the one stream"""
        j = self.stream_index(modality)
        plane = self.extractor.forward_one(img, self.kinds[j])
        tokens = self.backbone.forward_stream(plane, self.streams[j])
        cls = tokens[:, :1]
        fused = torch.sigmoid(self.heads[j](cls[:, 0])).squeeze(-1)
        batch = cls.shape[0]
        return Prediction(p=torch.ones(batch, 1, dtype=fused.dtype, device=fused.device),
                          per_head=fused.unsqueeze(-1),
                          fused=fused,
                          argmax_modality=torch.full((batch,), j, dtype=torch.int64, device=fused.device),
                          cls=cls)

    def forward_single(self, img, modality):
        """probability from a single stream and its own head, no fusion; used in phase 1"""
        return self.predict_single(img, modality).fused

    def fragment_prefixes(self, modality):
        """state-dict prefixes that make up the phase-1 fragment of ``modality``"""
        if modality == ENCODER:
            if self.adapter is None:
                raise ConfigurationError('phase-1 encoder training requires the adapter to be enabled')
            return ('adapter.encoder.',)
        j = self.stream_index(modality)
        name = self.streams[j]
        prefixes = (f'backbone.embed.{name}.', f'backbone.lora.{name}.', f'heads.{j}.')
        if self.kinds[j] is ExtractorKind.BAYAR:
            prefixes += ('extractor.bayar_kernel',)
        return prefixes

    def phase1_targets(self):
        """every phase-1 fragment phase 2 needs, one per stream plus the encoder when the adapter is on"""
        targets = list(self.streams)
        if self.adapter is not None:
            targets.append(ENCODER)
        return targets

    def set_phase(self, phase, modality=None, freeze_lora=False):
        """mark what trains in ``phase``. The frozen base never trains

        Phase 1 trains one stream's embedding, LoRA experts and head, the Bayar
        stream its constrained kernel as well, or with
        ``modality='encoder'`` the low-level encoder. Phase 2 trains the fusion
        gates, the adapter, the router and heads, and the LoRA experts unless
        ``freeze_lora``.

        Returns
        -------
        names : list
            of trainable parameter names
        """
        self.requires_grad_(False)
        if phase == 1:
            if modality is None:
                raise ConfigurationError('phase 1 trains one modality at a time, modality must be specified')
            if modality == ENCODER:
                if self.adapter is None:
                    raise ConfigurationError('phase-1 encoder training requires the adapter to be enabled')
                self.adapter.encoder.requires_grad_(True)
            else:
                j = self.stream_index(modality)
                name = self.streams[j]
                self.backbone.embed[name].requires_grad_(True)
                if self.use_lora:
                    self.backbone.lora[name].requires_grad_(True)
                self.heads[j].requires_grad_(True)
                if self.kinds[j] is ExtractorKind.BAYAR:
                    self.extractor.bayar_kernel.requires_grad_(True)
        elif phase == 2:
            if self.backbone.fuse is not None:
                self.backbone.fuse.requires_grad_(True)
            if self.adapter is not None:
                self.adapter.requires_grad_(True)
            if self.router is not None:
                self.router.requires_grad_(True)
                self.heads.requires_grad_(True)
            else:
                self.shared_head.requires_grad_(True)
            if self.use_lora and not freeze_lora:
                self.backbone.lora.requires_grad_(True)
        else:
            raise ConfigurationError(f'phase must be 1 or 2, but was {phase}')
        return [name for name, param in self.named_parameters() if param.requires_grad]
