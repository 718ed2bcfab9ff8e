# %% [markdown]
# # Orthogonal space-time block codes
#
# Encode a block of symbols, pass it through a flat Rayleigh channel and
# recover the symbols with the closed-form linear combiner.

# %%
import numpy as np

from stbcsim import channel, stbc

for id, d in stbc.DESIGNS.items():
    print(f"{id:9s} n_tx={d.n_tx} slots={d.l} symbols={d.n_syms} rate={d.rate}")

# %% [markdown]
# The code matrix of the four-antenna design has orthogonal columns, so the
# Gram matrix is a multiple of the identity.

# %%
rng = np.random.default_rng(1)
g4 = stbc.design("g4")
S = channel.complex_normal(rng, g4.n_syms)
G = stbc.encode(S, g4)
print(np.round(G.conj().T @ G, 12))
print("sum |S|^2 =", np.sum(np.abs(S) ** 2).round(12))

# %% [markdown]
# Without noise the combiner returns the symbols exactly. With noise every
# estimate sees the same SNR as maximal ratio combining over all
# ``n_tx * n_rx`` paths.

# %%
H = channel.draw_channel(g4.n_tx, 2, rng).h
print(np.abs(stbc.combine(G @ H, H, g4).estimates - S).max())

sigma2, draws = 0.2, 100_000
R = G @ H + channel.complex_normal(rng, (draws, g4.l, 2), sigma2)
est = stbc.combine(R, np.broadcast_to(H, (draws,) + H.shape), g4, sigma2).estimates
# SNR for unit-energy symbols: the estimation noise does not depend on S
empirical = 1 / (np.mean(np.abs(est - S) ** 2, axis=0) / 2)
print("empirical SNR per symbol:", np.round(empirical, 2))
print("MRC prediction:          ", round(float(stbc.combined_snr(H, sigma2)), 2))

# %% [markdown]
# Rate and energy limits for complex orthogonal designs.

# %%
for n in (2, 3, 4, 5):
    print(n, stbc.max_rate_bound(n), f"{stbc.energy_loss_bound_db(n):.2f} dB")
