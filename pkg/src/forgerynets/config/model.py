"""class to represent model section of config.ini file """
import attr

from ..errors import ConfigurationError
from ..extractors import DEFAULT_SRM_KERNELS, SRM_KERNELS, validate_kinds
from .validators import (
    is_list_of_int,
    is_list_of_str,
    is_non_neg_int,
    is_pos,
    is_pos_int,
    optional,
    to_bool,
    to_float,
    to_int,
    to_int_list,
    to_list,
    to_path,
)


def is_valid_kinds(instance, attribute, value):
    is_list_of_str(instance, attribute, value)
    validate_kinds(value)


def is_valid_srm_kernels(instance, attribute, value):
    is_list_of_str(instance, attribute, value)
    if len(value) != 3:
        raise ConfigurationError(f'{attribute.name} must name one kernel per RGB channel, got {value}')
    for name in value:
        if name not in SRM_KERNELS:
            raise ConfigurationError(f'invalid SRM kernel name: {name}. Valid names are: {sorted(SRM_KERNELS)}')


def is_optional_list_of_int(instance, attribute, value):
    if value is not None:
        is_list_of_int(instance, attribute, value)


def is_channel_pair(instance, attribute, value):
    is_list_of_int(instance, attribute, value)
    if len(value) != 2 or min(value) < 1:
        raise ConfigurationError(f'{attribute.name} must be two positive widths, got {value}')


@attr.s
class ModelConfig:
    """class to represent [MODEL] section of config.ini file

    Attributes
    ----------
    kinds : list
        of extractor kinds, 'image' exactly once plus distinct low-level kinds from
        {'srm', 'npr', 'bayar', 'hpr'}. Their order is the order of the modality axis.
        Default is ['image', 'srm', 'npr', 'bayar'].
    image_size : int
        Default is 32.
    patch_size : int
        Default is 4.
    embed_dim : int
        Default is 32.
    layers : int
        transformer layers. Default is 4.
    heads : int
        attention heads. Default is 4.
    lora_rank : int
        Default is 4.
    lora_alpha : float
        Default is 8.
    fusion_layers : list
        of layer indices where cross attention and the adapter act.
        Default is None: one quarter, one half, three quarters of the way through, and the final layer.
    adapter_channels : list
        widths of the two conv blocks of the low-level encoder. Default is [16, 32].
    use_lora, use_cross_attention, use_adapter, use_router : bool
        component switches used by ablations. All default to True.
    per_modality_gate : bool
        if True each stream gets its own cross-attention gate. Default is False.
    base_seed : int
        seed of the frozen base transformer. Default is 0.
    base_weights_path : Path
        checkpoint whose ``backbone.base.*`` entries replace the seeded base weights. Default is None.
    npr_factor : int
        Default is 2.
    hpr_sigma : float
        Default is 1.0.
    srm_kernels : list
        one SRM kernel name per RGB channel. Default is ['kb', 'kv', 'second_order'].
    """
    kinds = attr.ib(converter=to_list, validator=is_valid_kinds,
                    factory=lambda: ['image', 'srm', 'npr', 'bayar'])
    image_size = attr.ib(converter=to_int, validator=is_pos_int, default=32)
    patch_size = attr.ib(converter=to_int, validator=is_pos_int, default=4)
    embed_dim = attr.ib(converter=to_int, validator=is_pos_int, default=32)
    layers = attr.ib(converter=to_int, validator=is_pos_int, default=4)
    heads = attr.ib(converter=to_int, validator=is_pos_int, default=4)
    lora_rank = attr.ib(converter=to_int, validator=is_pos_int, default=4)
    lora_alpha = attr.ib(converter=to_float, validator=is_pos, default=8.0)
    fusion_layers = attr.ib(converter=optional(to_int_list), validator=is_optional_list_of_int, default=None)
    adapter_channels = attr.ib(converter=to_int_list, validator=is_channel_pair, factory=lambda: [16, 32])
    use_lora = attr.ib(converter=to_bool, default=True)
    use_cross_attention = attr.ib(converter=to_bool, default=True)
    use_adapter = attr.ib(converter=to_bool, default=True)
    use_router = attr.ib(converter=to_bool, default=True)
    per_modality_gate = attr.ib(converter=to_bool, default=False)
    base_seed = attr.ib(converter=to_int, validator=is_non_neg_int, default=0)
    base_weights_path = attr.ib(converter=optional(to_path), default=None)
    npr_factor = attr.ib(converter=to_int, validator=is_pos_int, default=2)
    hpr_sigma = attr.ib(converter=to_float, validator=is_pos, default=1.0)
    srm_kernels = attr.ib(converter=to_list, validator=is_valid_srm_kernels,
                          factory=lambda: list(DEFAULT_SRM_KERNELS))

    def __attrs_post_init__(self):
        self.kinds = [str(kind).strip().lower() for kind in self.kinds]
        if self.embed_dim % self.heads != 0:
            raise ConfigurationError(
                f'embed_dim {self.embed_dim} is not divisible by number of heads {self.heads}'
            )
        if self.image_size % self.patch_size != 0:
            raise ConfigurationError(
                f'image_size {self.image_size} is not divisible by patch_size {self.patch_size}'
            )
        if self.image_size % self.npr_factor != 0:
            raise ConfigurationError(
                f'image_size {self.image_size} is not divisible by npr_factor {self.npr_factor}'
            )
        if self.fusion_layers is not None:
            if any(layer < 0 or layer >= self.layers for layer in self.fusion_layers):
                raise ConfigurationError(
                    f'fusion_layers {self.fusion_layers} must lie in [0, {self.layers - 1}]'
                )
