"""Integer codes shared by both kernel backends."""

# sampler kinds
CONSTANT = 0
UNIFORM = 1
GAUSSIAN = 2
EXPONENTIAL = 3
SHIFTED_MIN = 4
LATENT = 5
EMPIRICAL = 6

# loss maps
LOSS_IDENTITY = 0
LOSS_NEG_INF = 1
LOSS_CARRY = 2

# output rules
OUT_PASSTHROUGH = 0
OUT_CONSTANT = 1
OUT_OFFSET = 2
OUT_ACCUMULATE = 3

GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1
INV_2_53 = 1.0 / 9007199254740992.0


def is_monotone(kind: int, loss_code: int) -> bool:
    """Loss is a non-decreasing function of the draw's uniform and ignores the input."""
    return loss_code == LOSS_IDENTITY and kind != LATENT
