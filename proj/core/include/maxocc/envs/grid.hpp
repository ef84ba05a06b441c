#pragma once

#include <array>
#include <cstdint>

namespace maxocc {

struct Cell {
    int x = 0;
    int y = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Movement action order shared by every grid environment:
/// up, down, left, right, up-left, up-right, down-left, down-right, nothing.
inline constexpr std::array<Cell, 9> kMoves = {{{0, 1},
                                                {0, -1},
                                                {-1, 0},
                                                {1, 0},
                                                {-1, 1},
                                                {1, 1},
                                                {-1, -1},
                                                {1, -1},
                                                {0, 0}}};

inline constexpr std::uint32_t kMoveCount = 9;
inline constexpr std::uint32_t kStayMove = 8;

inline Cell moved(Cell c, std::uint32_t move) {
    return {c.x + kMoves[move].x, c.y + kMoves[move].y};
}

}  // namespace maxocc
