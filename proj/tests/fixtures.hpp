#pragma once

// Regression fixtures recorded from the seeded generators.
#define FIXTURE_BERNOULLI_POPCOUNT 524580u
#define FIXTURE_BERNOULLI_FNV 12097677192747651343ull
