#include "vpmap/interaction.hpp"

#include "vpmap/errors.hpp"

namespace vpmap {

std::string to_string(InteractionType t) {
    switch (t) {
        case InteractionType::I: return "I";
        case InteractionType::II: return "II";
        case InteractionType::III: return "III";
        case InteractionType::IV: return "IV";
    }
    return "?";
}

InteractionType interaction_type_from_string(const std::string& s) {
    if (s == "I" || s == "1") return InteractionType::I;
    if (s == "II" || s == "2") return InteractionType::II;
    if (s == "III" || s == "3") return InteractionType::III;
    if (s == "IV" || s == "4") return InteractionType::IV;
    fail(ErrorCode::validation, "unknown interaction type '" + s + "'");
}

int interaction_rank(InteractionType type, int n1, int n2, int r1_order,
                     int n_components) {
    if (n1 < 1 || n2 < 1)
        fail(ErrorCode::validation, "interaction_rank: dimensions must be positive");
    if (r1_order != 1 && r1_order != 2)
        fail(ErrorCode::validation, "interaction_rank: r1 must be 1 or 2");
    const int c = n_components;
    switch (type) {
        case InteractionType::I: return n1 * n2;
        case InteractionType::II: return n2 * (n1 - r1_order);
        case InteractionType::III: return (n2 - c) * n1;
        case InteractionType::IV: return (n2 - c) * (n1 - r1_order);
    }
    return 0;
}

Eigen::MatrixXd constraint_rows(InteractionType type, int n1, int n2) {
    if (n1 < 2 || n2 < 2)
        fail(ErrorCode::validation, "constraint_rows: need n1, n2 >= 2");
    const int n = n1 * n2;
    const auto cell = [n1](int i, int j) { return j * n1 + i; };

    Eigen::MatrixXd area_rows = Eigen::MatrixXd::Zero(n2, n); // [I (x) 1]'
    for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) area_rows(j, cell(i, j)) = 1.0;

    Eigen::MatrixXd time_rows = Eigen::MatrixXd::Zero(n1, n); // [1 (x) I]'
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) time_rows(i, cell(i, j)) = 1.0;

    switch (type) {
        case InteractionType::I: return Eigen::MatrixXd(0, n);
        case InteractionType::II: return area_rows;
        case InteractionType::III: return time_rows;
        case InteractionType::IV: {
            Eigen::MatrixXd both(n1 + n2, n);
            both.topRows(n2) = area_rows;
            both.bottomRows(n1) = time_rows;
            return both;
        }
    }
    return Eigen::MatrixXd(0, n);
}

InteractionModel build_interaction(InteractionType type,
                                   const StructureMatrix& r1_scaled,
                                   const StructureMatrix& r2_scaled,
                                   int dim_cap) {
    if (r1_scaled.kind != StructureKind::rw1 && r1_scaled.kind != StructureKind::rw2)
        fail(ErrorCode::validation,
             "build_interaction: temporal factor must be rw1 or rw2");
    if (r2_scaled.kind != StructureKind::icar)
        fail(ErrorCode::validation,
             "build_interaction: spatial factor must be icar");
    if (!r1_scaled.scaled || !r2_scaled.scaled)
        fail(ErrorCode::validation,
             "build_interaction: factors must be scaled (generalized variance 1)");

    const int n1 = r1_scaled.order();
    const int n2 = r2_scaled.order();
    if (static_cast<long long>(n1) * n2 > dim_cap)
        fail(ErrorCode::size,
             "build_interaction: n1*n2 = " + std::to_string(n1 * n2) +
                 " exceeds the cap of " + std::to_string(dim_cap));

    const int r1_order = r1_scaled.kind == StructureKind::rw1 ? 1 : 2;
    const int n_comp = r2_scaled.components.empty()
                           ? 1
                           : static_cast<int>(r2_scaled.components.size());

    InteractionModel m;
    m.type = type;
    m.n1 = n1;
    m.n2 = n2;
    const Eigen::MatrixXd eye1 = Eigen::MatrixXd::Identity(n1, n1);
    const Eigen::MatrixXd eye2 = Eigen::MatrixXd::Identity(n2, n2);
    switch (type) {
        case InteractionType::I:
            m.structure.entries = Eigen::MatrixXd::Identity(n1 * n2, n1 * n2);
            break;
        case InteractionType::II:
            m.structure.entries = kronecker(eye2, r1_scaled.entries);
            break;
        case InteractionType::III:
            m.structure.entries = kronecker(r2_scaled.entries, eye1);
            break;
        case InteractionType::IV:
            m.structure.entries = kronecker(r2_scaled.entries, r1_scaled.entries);
            break;
    }
    m.structure.kind = StructureKind::kronecker;
    m.structure.scaled = true;
    m.constraints = constraint_rows(type, n1, n2);
    m.theoretical_rank = interaction_rank(type, n1, n2, r1_order, n_comp);
    m.spectral = spectral(m.structure);
    if (m.spectral.rank != m.theoretical_rank)
        fail(ErrorCode::numerical,
             "build_interaction: numeric rank " + std::to_string(m.spectral.rank) +
                 " disagrees with the closed form " +
                 std::to_string(m.theoretical_rank) + " for type " + to_string(type));
    return m;
}

} // namespace vpmap
