#include "imcop/types.hpp"

namespace imcop {

void check_coords(const Coords& coords, int dim) {
    if (coords.empty()) throw Error("coordinate subset must be non-empty");
    int prev = 0;
    for (int c : coords) {
        if (c <= prev) throw Error("coordinate subset must be strictly increasing");
        if (c < 1 || c > dim) throw Error("coordinate index outside 1..dim");
        prev = c;
    }
}

}  // namespace imcop
