#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "geolab/hurwitz.hpp"

namespace geolab {

using Word = std::vector<int>;

// Dense 0/1 matrix with bitset rows and successor lists.
class TransitionMatrix {
public:
    TransitionMatrix() = default;
    explicit TransitionMatrix(const std::vector<std::vector<int>>& dense);

    int size() const { return n_; }
    bool operator()(int x, int y) const { return (bits_[x][static_cast<size_t>(y) >> 6] >> (y & 63)) & 1u; }
    const std::vector<int>& successors(int x) const { return succ_[x]; }
    const std::vector<u64>& row_bits(int x) const { return bits_[x]; }
    i64 ones() const;
    void set(int x, int y);

private:
    int n_ = 0;
    std::vector<std::vector<u64>> bits_;
    std::vector<std::vector<int>> succ_;
    void init(int n);
    friend TransitionMatrix build_transitions(const Partition&);
};

TransitionMatrix build_transitions(const Partition& P);
// Rows (from_label, to_label) with a header line.
std::string transitions_csv(const TransitionMatrix& A);

struct Structure {
    bool irreducible = false;
    int period = 0;
    std::optional<int> primitivity_index;
};
Structure check_irreducible_aperiodic(const TransitionMatrix& A);

bool is_admissible(const TransitionMatrix& A, const Word& w);

// Depth-first lexicographic enumeration of admissible words of length n.
// The visitor receives each word in order.
template <class Visitor>
void enumerate_words(const TransitionMatrix& A, int n, Visitor&& visit, int from = -1, int to = -1) {
    Word w;
    if (n == 0) {
        if (from < 0 && to < 0) visit(w);
        return;
    }
    w.reserve(static_cast<size_t>(n));
    auto rec = [&](auto&& self, int depth) -> void {
        if (depth == n) {
            if (to < 0 || w.back() == to) visit(w);
            return;
        }
        auto step = [&](int y) {
            w.push_back(y);
            self(self, depth + 1);
            w.pop_back();
        };
        if (depth == 0) {
            if (from >= 0) step(from);
            else
                for (int y = 0; y < A.size(); ++y) step(y);
        } else {
            for (int y : A.successors(w.back())) step(y);
        }
    };
    rec(rec, 0);
}

// Number of admissible words of length n (optionally with fixed ends), via matrix powers.
u64 count_words(const TransitionMatrix& A, int n, int from = -1, int to = -1);

class GlueTable {
public:
    GlueTable() = default;
    explicit GlueTable(const TransitionMatrix& A);
    const std::array<int, 3>& at(int x, int y) const;
    int size() const { return n_; }

private:
    int n_ = 0;
    std::vector<std::array<int, 3>> table_;
};

Word glue(const Word& a, const Word& b, const GlueTable& table);

struct PeriodicWord {
    Word word;
    bool primitive = true;
};
// Lexicographically least rotation; requires cyclic admissibility.
PeriodicWord canonical_periodic(const TransitionMatrix& A, const Word& w);
// Smallest period of w (failure function).
int smallest_period(const Word& w);

std::string word_to_string(const Word& w);

}  // namespace geolab
