#pragma once

#include <cmath>
#include <limits>

#include "semoverlap/embeddings.hpp"
#include "semoverlap/error.hpp"
#include "semoverlap/stopwords.hpp"
#include "semoverlap/textproc.hpp"
#include "semoverlap/transport.hpp"

namespace semoverlap {

/// Shape of the similarity transform (a+1)/(a+e^(b*wmd)). The defaults are
/// the reward setting; a=0, b=1 gives plain e^(-wmd).
struct RewardParams {
    double a = 1.0;
    double b = 0.5;

    void validate() const {
        if (!(a >= 0.0) || !std::isfinite(a))
            throw Error(ErrorKind::input, "reward parameter a must be finite and >= 0");
        if (!(b > 0.0) || !std::isfinite(b))
            throw Error(ErrorKind::input, "reward parameter b must be finite and > 0");
    }
};

inline constexpr RewardParams kExpSimilarity{0.0, 1.0};

enum class Degeneracy {
    none,
    one_empty,
    both_empty,
};

struct OverlapScore {
    /// +infinity for degenerate pairs.
    double wmd = 0.0;
    double wms = 1.0;
    bool degenerate = false;
    Degeneracy kind = Degeneracy::none;
};

inline double wms(double wmd, const RewardParams& params = {}) {
    if (!(wmd >= 0.0))
        throw Error(ErrorKind::input, "wmd must be non-negative");
    if (wmd == 0.0)
        return 1.0;
    if (std::isinf(wmd))
        return 0.0;
    return (params.a + 1.0) / (params.a + std::exp(params.b * wmd));
}

/// Exact WMD between two prepared bags. Both must be non-empty.
inline double nbow_wmd(const NBow& x, const NBow& y, const EmbeddingTable& table) {
    return solve_exact(x, y, cost_matrix(x, y, table)).objective;
}

/// Applies the degenerate-pair policy when either bag is empty, otherwise
/// solves exact transport.
inline OverlapScore score_nbows(const NBow& x, const NBow& y, const EmbeddingTable& table,
                                const RewardParams& params = {}) {
    if (x.empty() || y.empty()) {
        const bool both = x.empty() && y.empty();
        return {std::numeric_limits<double>::infinity(), both ? 1.0 : 0.0, true,
                both ? Degeneracy::both_empty : Degeneracy::one_empty};
    }
    const double d = nbow_wmd(x, y, table);
    return {d, wms(d, params), false, Degeneracy::none};
}

inline OverlapScore sentence_wmd(const Sentence& x, const Sentence& y, const EmbeddingTable& table,
                                 const StopwordSet* stopwords = nullptr, const RewardParams& params = {}) {
    return score_nbows(to_nbow(x, table, stopwords), to_nbow(y, table, stopwords), table, params);
}

/// Per-step reward for a generated sentence against its gold counterpart.
inline OverlapScore reward(const Sentence& gold, const Sentence& generated, const EmbeddingTable& table,
                           const RewardParams& params = {}, const StopwordSet* stopwords = nullptr) {
    params.validate();
    return sentence_wmd(gold, generated, table, stopwords, params);
}

} // namespace semoverlap
