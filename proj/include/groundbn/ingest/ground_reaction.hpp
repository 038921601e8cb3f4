#pragma once

#include "groundbn/errors.hpp"

namespace groundbn::ingest {

// Ground reaction in tonnes: displacement before stranding minus the
// displacement read off the hydrostatics at the observed drafts.
inline double ground_reaction_displacement(double displacement_t, double displacement_at_drafts_t) {
    if (displacement_at_drafts_t > displacement_t)
        throw Error(ErrorCode::NegativeReaction,
                    "displacement at the observed drafts exceeds the intact displacement", "displacement_at_drafts");
    return displacement_t - displacement_at_drafts_t;
}

}  // namespace groundbn::ingest
