"""Order-of-magnitude background population sizes (literature estimates).

These are shipped as named values for scenario building; nothing in the
package derives them.
"""

from __future__ import annotations

# mammals alive since the end-Cretaceous extinction, 10^11 at a time, turnover 0.1/yr
MAMMALS_SINCE_KPG = 6.6e17
# the less conservative vertebrate count over the same period
VERTEBRATES_SINCE_KPG = 5e20
# mammals weighted by cortical neuron count relative to humans
MAMMALS_NEURON_WEIGHTED = 2.3e15
# ... and additionally weighted by lifespan
MAMMALS_NEURON_AND_LIFESPAN_WEIGHTED = 2.3e13

BACKGROUND_PRESETS = {
    "mammals-since-kpg": MAMMALS_SINCE_KPG,
    "vertebrates-since-kpg": VERTEBRATES_SINCE_KPG,
    "mammals-neuron-weighted": MAMMALS_NEURON_WEIGHTED,
    "mammals-neuron-lifespan-weighted": MAMMALS_NEURON_AND_LIFESPAN_WEIGHTED,
}
