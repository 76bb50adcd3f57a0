from pathlib import Path


def make_save_path(save_path, *parts):
    """make a directory for the outputs of one run, ``save_path/parts...``"""
    save_path = Path(save_path).joinpath(*parts)
    save_path.mkdir(parents=True, exist_ok=True)
    return save_path


def replicate_seeds(seed, replicates):
    """seeds of training replicates, ``seed``, ``seed + 1``, ..."""
    return [seed + replicate for replicate in range(replicates)]


def phase1_ckpt_path(save_path, modality):
    """where phase 1 saves the fragment of ``modality``"""
    return Path(save_path).joinpath(f'phase1_{modality}.ckpt')


def phase2_ckpt_path(save_path):
    return Path(save_path).joinpath('phase2.ckpt')


def replicate_save_path(save_path, seed, replicates):
    """directory of one training replicate: ``save_path`` itself for a single replicate,
    ``save_path/replicate_{seed}`` otherwise"""
    if replicates > 1:
        return make_save_path(save_path, f'replicate_{seed}')
    return make_save_path(save_path)
