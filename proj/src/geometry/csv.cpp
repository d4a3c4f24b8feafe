#include "cuspfs/geometry/csv.hpp"

#include <array>
#include <iomanip>

namespace cuspfs::geometry {

void write_csv(std::ostream& os, const TensorField& field) {
    const int m = field.dim();
    const int rank = field.valence().rank();
    os << "x0";
    if (m == 2) os << ",x1";
    std::array<int, kMaxRank> slots{};
    for (std::size_t c = 0; c < field.components(); ++c) {
        component_slots(m, c, std::span<int>(slots.data(), static_cast<std::size_t>(rank)));
        os << ",c";
        for (int s = 0; s < rank; ++s) os << slots[s];
    }
    os << '\n' << std::setprecision(17);
    for (std::size_t n = 0; n < field.nodes(); ++n) {
        const Point p = field.grid()->point(n);
        os << p[0];
        if (m == 2) os << ',' << p[1];
        for (double v : field.at(n)) os << ',' << v;
        os << '\n';
    }
}

}  // namespace cuspfs::geometry
