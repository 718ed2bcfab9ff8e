# %% [markdown]
# # Convolutional coding, puncturing and interleaving
#
# The outer code is the memory-6 (133, 171) code, optionally punctured to
# rate 2/3, followed by a random bit interleaver.

# %%
import numpy as np

from stbcsim import fec

rng = np.random.default_rng(2)
info = rng.integers(0, 2, size=(4, 2094), dtype=np.uint8)
coded = fec.conv_encode(info)
punct = fec.puncture(coded)
print("info", info.shape[-1], "coded", coded.shape[-1], "punctured", punct.shape[-1])

# %%
il = fec.Interleaver.random(punct.shape[-1], rng)
tx = il.interleave(punct)

# %% [markdown]
# BPSK over AWGN at Eb/N0 = 4 dB, then the receiver undoes each step.
# Punctured positions come back as zero LLRs.

# %%
ebn0 = 10 ** (4 / 10)
sigma2 = 1 / (2 * ebn0 * 2 / 3)
y = 2.0 * tx - 1 + np.sqrt(sigma2) * rng.standard_normal(tx.shape)
llr = fec.depuncture(il.deinterleave(2 * y / sigma2))
soft = fec.viterbi_decode_soft(llr)
# hard decisions enter the same trellis as +-1, with erasures left at zero
hard = fec.viterbi_decode_soft(fec.depuncture(il.deinterleave(np.sign(y))))
print("raw channel errors:", np.count_nonzero((y > 0) != tx))
print("soft decoded errors:", np.count_nonzero(soft != info))
print("hard decoded errors:", np.count_nonzero(hard != info))
