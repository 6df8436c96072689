#pragma once

#include <string>

#include "vpmap/structure.hpp"

namespace vpmap {

// The four space-time interaction structures. Writing R1 for the temporal
// and R2 for the spatial structure:
//   I   : I  (x) I     unstructured cell-level variation
//   II  : I  (x) R1    temporal trend varies freely by area
//   III : R2 (x) I     spatial pattern varies freely by time
//   IV  : R2 (x) R1    fully structured space-time dependence
enum class InteractionType { I, II, III, IV };

std::string to_string(InteractionType t);
InteractionType interaction_type_from_string(const std::string& s);

// Kronecker interaction structure with its identifiability constraints.
// The interaction vector is laid out time-fastest: cell (i, j) sits at
// index j*n1 + i, matching the R2 (x) R1 block order.
struct InteractionModel {
    InteractionType type = InteractionType::I;
    StructureMatrix structure; // kind kronecker, order n1*n2
    Eigen::MatrixXd constraints; // rows annihilated by the structure
    int theoretical_rank = 0;
    SpectralDecomposition spectral; // cached; rank verified against theory
    int n1 = 0;
    int n2 = 0;
};

// Closed-form rank of the interaction structure; c counts the connected
// components of the spatial graph (1 for a connected map).
int interaction_rank(InteractionType type, int n1, int n2, int r1_order,
                     int n_components);

// Sum-to-zero constraint rows for the given type, laid out time-fastest.
// Type I has none; II pins each area's time profile, III pins each time
// point's spatial slice, IV stacks both (one row is redundant).
Eigen::MatrixXd constraint_rows(InteractionType type, int n1, int n2);

// Builds the interaction from scaled temporal (rw1/rw2) and spatial (icar)
// structures; identity factors are generated internally and need no
// rescaling. The numeric rank is verified against the closed form.
InteractionModel build_interaction(InteractionType type,
                                   const StructureMatrix& r1_scaled,
                                   const StructureMatrix& r2_scaled,
                                   int dim_cap = 10000);

} // namespace vpmap
