from vtrl.contrastive.config import ContrastiveConfig
from vtrl.contrastive.model import (
    Encoder,
    Head,
    RepresentationModel,
    clone_encoder,
    encode,
    head_apply,
    normalize_rows,
)
from vtrl.contrastive.augment import (
    AugmentedPair,
    ViewBatch,
    augment_pair,
    augment_views,
    center_crop,
    crop_batch,
    random_offsets,
)
from vtrl.contrastive.losses import (
    combined_loss,
    compute_keys,
    contrastive_terms,
    info_nce,
    inter_loss,
    intra_loss,
    momentum_update,
)
from vtrl.contrastive.pretrain import (
    cross_modal_retrieval_accuracy,
    pixel_retrieval_accuracy,
    pretrain,
)
