#pragma once

// Umbrella header for the core library. The io/ headers pull in the JSON
// dependency and are included separately by code that needs persistence.

#include "qta/assurance_case.hpp"
#include "qta/bayes.hpp"
#include "qta/beta_logic.hpp"
#include "qta/completeness.hpp"
#include "qta/errors.hpp"
#include "qta/trial_ledger.hpp"
