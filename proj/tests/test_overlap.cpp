#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracle/lp_oracle.hpp"
#include "semoverlap/overlap.hpp"
#include "support.hpp"

using namespace semoverlap;
using testing_support::one_hot_table;
using testing_support::words;

namespace {

// Independent WMD: nBOW by plain counting and the LP oracle over costs
// computed straight from the table rows.
double oracle_wmd(const std::vector<std::string>& x, const std::vector<std::string>& y,
                  const EmbeddingTable& table) {
    auto bag = [](const std::vector<std::string>& toks) {
        std::vector<std::string> keys;
        std::vector<double> w;
        for (const auto& t : toks) {
            auto it = std::find(keys.begin(), keys.end(), t);
            if (it == keys.end()) {
                keys.push_back(t);
                w.push_back(1.0);
            } else {
                w[static_cast<std::size_t>(it - keys.begin())] += 1.0;
            }
        }
        for (double& v : w)
            v /= static_cast<double>(toks.size());
        return std::pair{keys, w};
    };
    auto [kx, wx] = bag(x);
    auto [ky, wy] = bag(y);
    std::vector<double> costs;
    for (const auto& a : kx)
        for (const auto& b : ky) {
            auto ra = *table.lookup(a), rb = *table.lookup(b);
            long double sq = 0;
            for (std::size_t k = 0; k < ra.size(); ++k)
                sq += (static_cast<long double>(ra[k]) - rb[k]) * (static_cast<long double>(ra[k]) - rb[k]);
            costs.push_back(static_cast<double>(std::sqrt(sq)));
        }
    return oracle::transport_lp(wx, wy, costs);
}

} // namespace

TEST(Wms, ZeroDistanceIsOne) {
    for (double a : {0.0, 0.5, 1.0, 7.0})
        for (double b : {0.1, 0.5, 1.0, 3.0})
            EXPECT_EQ(wms(0.0, {a, b}), 1.0);
}

TEST(Wms, ZeroOneCaseIsExpNeg) {
    for (int k = 0; k <= 1000; ++k) {
        const double w = 10.0 * k / 1000.0;
        EXPECT_NEAR(wms(w, kExpSimilarity), std::exp(-w), 1e-12);
    }
}

TEST(Wms, DefaultParamsAtTwo) {
    // 2/(1+e) evaluated with 40-digit arithmetic.
    constexpr double kExpected = 0.5378828427399902414976815163563274512697;
    EXPECT_NEAR(wms(2.0, RewardParams{1.0, 0.5}), kExpected, 1e-15);
    EXPECT_NEAR(wms(2.0), kExpected, 1e-15);
}

TEST(Wms, MonotoneAndBounded) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ua(0.0, 5.0), ub(0.01, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        RewardParams p{ua(rng), ub(rng)};
        double prev = wms(0.0, p);
        EXPECT_EQ(prev, 1.0);
        for (int k = 1; k <= 400; ++k) {
            const double cur = wms(0.05 * k, p);
            EXPECT_GT(cur, 0.0);
            EXPECT_LE(cur, 1.0);
            EXPECT_LT(cur, prev);
            prev = cur;
        }
    }
    EXPECT_THROW(wms(-1.0), Error);
    EXPECT_EQ(wms(std::numeric_limits<double>::infinity()), 0.0);
}

TEST(RewardParams, Validation) {
    EXPECT_NO_THROW((RewardParams{0.0, 1.0}.validate()));
    EXPECT_THROW((RewardParams{-0.1, 1.0}.validate()), Error);
    EXPECT_THROW((RewardParams{1.0, 0.0}.validate()), Error);
}

TEST(SentenceWmd, Examples) {
    auto table = one_hot_table({"cat", "dog", "eel", "owl"});
    auto same = sentence_wmd(words({"cat", "dog"}), words({"dog", "cat"}), table);
    EXPECT_EQ(same.wmd, 0.0);
    EXPECT_FALSE(same.degenerate);

    auto single = sentence_wmd(words({"cat"}), words({"dog"}), table);
    EXPECT_DOUBLE_EQ(single.wmd, std::sqrt(2.0));
}

TEST(SentenceWmd, ThreeByThreeMatchesOracle) {
    auto table = testing_support::random_table(10, 6, 42);
    const std::vector<std::string> x{"w1", "w2", "w3"}, y{"w4", "w2", "w7"};
    auto s = sentence_wmd(words(x), words(y), table);
    EXPECT_NEAR(s.wmd, oracle_wmd(x, y, table), 1e-9);
}

TEST(SentenceWmd, StopwordsAndDegeneracy) {
    auto table = one_hot_table({"the", "cat", "dog"});
    StopwordSet stop{"the"};
    auto only_stop = sentence_wmd(words({"the"}), words({"cat"}), table, &stop);
    EXPECT_TRUE(only_stop.degenerate);
    EXPECT_TRUE(std::isinf(only_stop.wmd));
    EXPECT_EQ(only_stop.wms, 0.0);
    EXPECT_EQ(only_stop.kind, Degeneracy::one_empty);

    auto both = sentence_wmd(words({"the"}), words({"zzz"}), table, &stop);
    EXPECT_TRUE(both.degenerate);
    EXPECT_EQ(both.wms, 1.0);
    EXPECT_EQ(both.kind, Degeneracy::both_empty);
}

TEST(Reward, Examples) {
    auto table = testing_support::random_table(10, 6, 7);
    const RewardParams params{1.0, 0.5};
    auto gold = words({"w1", "w2", "w3"});
    EXPECT_EQ(reward(gold, gold, table, params).wms, 1.0);

    auto oov = reward(gold, words({"nope", "nada"}), table, params);
    EXPECT_EQ(oov.wms, 0.0);
    EXPECT_TRUE(oov.degenerate);

    const std::vector<std::string> g{"w0", "w5", "w5", "w9"}, h{"w2", "w5", "w8"};
    const double w = oracle_wmd(g, h, table);
    auto r = reward(words(g), words(h), table, params);
    EXPECT_NEAR(r.wmd, w, 1e-9);
    EXPECT_NEAR(r.wms, 2.0 / (1.0 + std::exp(0.5 * w)), 1e-12);

    EXPECT_THROW(reward(gold, gold, table, RewardParams{1.0, -1.0}), Error);
}

TEST(Reward, ArgmaxRewardIsArgminWmd) {
    auto table = testing_support::random_table(25, 8, 9);
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 40; ++trial) {
        auto gold = testing_support::random_sentence(rng, 25, 6);
        std::vector<Sentence> cands;
        for (int c = 0; c < 8; ++c)
            cands.push_back(testing_support::random_sentence(rng, 25, 1 + rng() % 8));
        std::size_t by_reward = 0, by_wmd = 0;
        for (std::size_t c = 1; c < cands.size(); ++c) {
            if (reward(gold, cands[c], table).wms > reward(gold, cands[by_reward], table).wms)
                by_reward = c;
            if (sentence_wmd(gold, cands[c], table).wmd < sentence_wmd(gold, cands[by_wmd], table).wmd)
                by_wmd = c;
        }
        EXPECT_EQ(by_reward, by_wmd);
    }
}
