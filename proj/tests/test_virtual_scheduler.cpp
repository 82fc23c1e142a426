#include <doctest.h>

#include <numeric>
#include <set>

#include <ccdyn/virtual_scheduler.hpp>

using namespace ccdyn;

namespace {

std::vector<std::vector<int>> one_based(const std::vector<VirtualIndexSet>& sets) {
    std::vector<std::vector<int>> out;
    for (const auto& s : sets) {
        std::vector<int> m;
        for (int x : s.members)
            m.push_back(x + 1);
        out.push_back(std::move(m));
    }
    return out;
}

} // namespace

TEST_CASE("index sets reproduce the P=3 example") {
    auto sp = SystemParams::make(4, 3, 1);
    auto sets = generate_index_sets(sp, 2);
    REQUIRE(sets.size() == 6);
    CHECK(one_based(sets) == std::vector<std::vector<int>>{
                                 {1, 2, 3}, {1, 3, 2}, {2, 3, 1}, {2, 1, 3}, {3, 1, 2}, {3, 2, 1}});
}

TEST_CASE("index sets for P=2") {
    auto sp = SystemParams::make(1, 2, 1);
    auto sets = generate_index_sets(sp, 1);
    CHECK(one_based(sets) == std::vector<std::vector<int>>{{1, 2}, {2, 1}});
}

TEST_CASE("index set structural invariants") {
    for (int P = 2; P <= 8; ++P)
        for (int t = 1; t < P; ++t) {
            if (std::gcd(t, P) != 1)
                continue;
            for (int ab = 1; t + ab <= P; ++ab) {
                auto sp = SystemParams::make(1, P, t);
                auto sets = generate_index_sets(sp, ab);
                REQUIRE(sets.size() == static_cast<size_t>(P) * (P - t));
                for (size_t i = 0; i < sets.size(); ++i) {
                    const auto& s = sets[i];
                    REQUIRE(s.members.size() == static_cast<size_t>(t + ab));
                    CHECK(std::set<int>(s.members.begin(), s.members.end()).size() ==
                          s.members.size());
                    for (int k = 0; k < t; ++k)
                        CHECK(s.members[k] == (s.round + k) % P);
                    // round r+1 is the elementwise increment of round r
                    if (s.round > 0) {
                        const auto& prev = sets[i - (P - t)];
                        for (size_t k = 0; k < s.members.size(); ++k)
                            CHECK(s.members[k] == (prev.members[k] + 1) % P);
                    }
                }
            }
        }
}

TEST_CASE("unsupported regime is refused") {
    auto sp = SystemParams::make(4, 3, 1);
    CHECK_THROWS_AS(generate_index_sets(sp, 3), UnsupportedRegimeError);
}

TEST_CASE("index-set occurrence census") {
    auto check_census = [](int P, int t, int ab) {
        auto sp = SystemParams::make(1, P, t);
        auto census = lemma1_census(generate_index_sets(sp, ab), P);
        for (const auto& row : census)
            for (long long c : row)
                CHECK(c == P - t);
    };
    check_census(3, 1, 2); // all entries 2
    check_census(2, 1, 1); // all entries 1
    check_census(6, 1, 3); // all entries 5
    for (int P = 2; P <= 8; ++P)
        for (int t = 1; t < P; ++t) {
            if (std::gcd(t, P) != 1)
                continue;
            for (int ab = 1; t + ab <= P; ++ab)
                check_census(P, t, ab);
        }
}

TEST_CASE("packet assignment for t_bar = 1 matches the example") {
    auto sp = SystemParams::make(4, 3, 1);

    VirtualIndexSet k1{0, 0, {0, 1, 2}}; // 1-based (1,2,3)
    auto vt = assign_packets(k1, sp);
    REQUIRE(vt.streams.size() == 3);
    CHECK(vt.streams[0].target == 0);
    CHECK(vt.streams[0].packet == 1);
    CHECK(vt.streams[0].suppressed == std::vector<int>{2});
    CHECK(vt.streams[1].target == 1);
    CHECK(vt.streams[1].packet == 0);
    CHECK(vt.streams[1].suppressed == std::vector<int>{2});
    CHECK(vt.streams[2].target == 2);
    CHECK(vt.streams[2].packet == 0);
    CHECK(vt.streams[2].suppressed == std::vector<int>{1});

    VirtualIndexSet k2{1, 0, {1, 2, 0}}; // 1-based (2,3,1)
    auto vt2 = assign_packets(k2, sp);
    CHECK(vt2.streams[0].packet == 2);
    CHECK(vt2.streams[0].suppressed == std::vector<int>{0});
    CHECK(vt2.streams[1].packet == 1);
    CHECK(vt2.streams[1].suppressed == std::vector<int>{0});
    CHECK(vt2.streams[2].packet == 1);
    CHECK(vt2.streams[2].suppressed == std::vector<int>{2});

    // alpha_bar = 1 forces empty suppression sets
    auto sp2 = SystemParams::make(1, 2, 1);
    VirtualIndexSet pair{0, 0, {0, 1}};
    auto vt3 = assign_packets(pair, sp2);
    CHECK(vt3.streams[0].packet == 1);
    CHECK(vt3.streams[0].suppressed.empty());
    CHECK(vt3.streams[1].packet == 0);
    CHECK(vt3.streams[1].suppressed.empty());
}

TEST_CASE("virtual decodability holds for every generated stream") {
    for (int P = 2; P <= 8; ++P)
        for (int ab = 1; 1 + ab <= P; ++ab) {
            auto sp = SystemParams::make(ab, P, 1); // alpha irrelevant here
            auto V = build_placement_matrix(P, 1);
            for (const auto& s : generate_index_sets(sp, ab))
                CHECK(check_virtual_decodability(V, assign_packets(s, sp), ab));
        }
}

TEST_CASE("packet-assignment completeness for t_bar = 1") {
    // Weighted over elevation multiplicities, each (profile, missing packet)
    // pair must accrue exactly rho subpacket slots.
    for (int P = 2; P <= 6; ++P)
        for (int eta = 1; eta <= 4; ++eta)
            for (int alpha = 1; alpha <= 8; ++alpha) {
                auto sp = SystemParams::make(alpha, P, 1);
                auto dp = DerivedParams::make(sp, eta);
                if (1 + dp.alpha_bar > P)
                    continue;
                std::vector<std::vector<long long>> tally(P, std::vector<long long>(P, 0));
                for (const auto& vt : build_virtual_schedule(sp, dp))
                    for (size_t pos = 0; pos < vt.streams.size(); ++pos) {
                        const bool last = pos + 1 == vt.streams.size();
                        tally[vt.streams[pos].target][vt.streams[pos].packet] +=
                            last ? dp.b : dp.eta_hat;
                    }
                auto V = build_placement_matrix(P, 1);
                for (int p = 0; p < P; ++p)
                    for (int q = 0; q < P; ++q)
                        CHECK(tally[p][q] == (V.at(q, p) ? 0 : dp.rho));
            }
}

TEST_CASE("constraint search covers t_bar > 1") {
    auto sp = SystemParams::make(2, 5, 2); // alpha = 2, eta_hat = 1 -> alpha_bar = 2
    auto dp = DerivedParams::make(sp, 1);
    auto vts = build_virtual_schedule(sp, dp);
    REQUIRE(vts.size() == 15);
    auto V = build_placement_matrix(5, 2);
    for (const auto& vt : vts)
        CHECK(check_virtual_decodability(V, vt, dp.alpha_bar));

    // completeness under elevation weights
    std::vector<std::vector<long long>> tally(5, std::vector<long long>(5, 0));
    for (const auto& vt : vts)
        for (size_t pos = 0; pos < vt.streams.size(); ++pos) {
            const bool last = pos + 1 == vt.streams.size();
            tally[vt.streams[pos].target][vt.streams[pos].packet] += last ? dp.b : dp.eta_hat;
        }
    for (int p = 0; p < 5; ++p)
        for (int q = 0; q < 5; ++q)
            CHECK(tally[p][q] == (V.at(q, p) ? 0 : dp.rho));

    // closed-form rule refuses t_bar > 1 on its own
    VirtualIndexSet some{0, 0, {0, 1, 2}};
    CHECK_THROWS_AS(assign_packets(some, sp), UnsupportedRegimeError);
}

TEST_CASE("index set debug dump uses 1-based labels") {
    auto sp = SystemParams::make(1, 2, 1);
    CHECK(render_index_sets(generate_index_sets(sp, 1)) == "r=1 j=1: (1,2)\nr=2 j=1: (2,1)\n");
}
