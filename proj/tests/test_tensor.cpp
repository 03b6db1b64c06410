#include <cmath>
#include <limits>

#include "doctest.h"
#include "swf/errors.hpp"
#include "swf/tensor.hpp"

using namespace swf;

TEST_CASE("tensor construction and shape") {
    Tensor t({1, 2, 2});
    CHECK(t.rank() == 3);
    CHECK(t.size() == 4);
    for (size_t i = 0; i < t.size(); ++i) CHECK(t.data()[i] == 0.0f);

    Tensor v = make_tensor({2, 2}, {1, 2, 3, 4});
    CHECK(v[0] == 1.0f);
    CHECK_THROWS_AS(v.at3(0, 0, 0), SizeMismatchError); // rank-3 only
}

TEST_CASE("make_tensor validates") {
    CHECK_THROWS_AS(make_tensor({2, 2}, {1, 2, 3}), SizeMismatchError);
    CHECK_THROWS_AS(make_tensor({2}, {1, std::numeric_limits<float>::quiet_NaN()}),
                    DomainError);
    CHECK_THROWS_AS(make_tensor({2}, {1, std::numeric_limits<float>::infinity()}),
                    DomainError);
    CHECK_NOTHROW(make_tensor({3, 12, 12}, std::vector<float>(432, 0.5f)));
}

TEST_CASE("at3 and index3 bounds") {
    Tensor t({2, 3, 4});
    CHECK(t.index3(1, 2, 3) == t.size() - 1);
    CHECK_THROWS_AS(t.index3(2, 0, 0), SizeMismatchError);
    CHECK_THROWS_AS(t.index3(0, 3, 0), SizeMismatchError);
    CHECK_THROWS_AS(t.index3(0, 0, 4), SizeMismatchError);
    Tensor flat({5});
    CHECK_THROWS_AS(flat.index3(0, 0, 0), SizeMismatchError);
}

TEST_CASE("changed_fraction counts relative changes above the threshold") {
    Tensor a = make_tensor({4}, {1, 1, 1, 1});
    Tensor b = make_tensor({4}, {1, 1, -1, -1});
    CHECK(changed_fraction(a, b, 0.95) == doctest::Approx(0.5));
    CHECK(changed_fraction(a, a, 0.95) == 0.0);
    // threshold zero is legal: any nonzero relative change counts
    Tensor c = make_tensor({4}, {1, 1, 1, 1.5});
    CHECK(changed_fraction(a, c, 0.0) == doctest::Approx(0.25));
    CHECK_THROWS_AS(changed_fraction(a, make_tensor({3}, {1, 1, 1}), 0.95),
                    SizeMismatchError);
    CHECK_THROWS_AS(changed_fraction(a, b, -0.1), DomainError);
}

TEST_CASE("rotation permutations") {
    ChannelPermutation r = rotation(6, 3);
    CHECK(r.order == std::vector<int>{3, 4, 5, 0, 1, 2});
    CHECK(rotation(6, 4).order == std::vector<int>{4, 5, 0, 1, 2, 3});
    CHECK(rotation(2, 1).order == std::vector<int>{1, 0});
    CHECK_FALSE(r.is_identity());
    CHECK(ChannelPermutation::identity(4).is_identity());
    CHECK_THROWS_AS(rotation(6, 0), DomainError);
    CHECK_THROWS_AS(rotation(6, 6), DomainError);
    CHECK_THROWS_AS(rotation(1, 1), DomainError);
}

TEST_CASE("permute_outer moves whole channel slices") {
    Tensor w = make_tensor({3, 1, 2, 2},
                           {0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2});
    Tensor shifted = permute_outer(w, rotation(3, 1));
    // slice j of the result is source slice (j + 1) mod 3
    CHECK(shifted.data()[0] == 1.0f);
    CHECK(shifted.data()[4] == 2.0f);
    CHECK(shifted.data()[8] == 0.0f);

    // applying the inverse rotation restores the original bit-for-bit
    Tensor back = permute_outer(shifted, rotation(3, 2));
    CHECK(bit_equal(back, w));

    CHECK(bit_equal(permute_outer(w, ChannelPermutation::identity(3)), w));
    CHECK_THROWS_AS(permute_outer(w, ChannelPermutation::identity(4)),
                    SizeMismatchError);
}

TEST_CASE("bit_equal distinguishes representations, not just values") {
    Tensor a = make_tensor({1}, {0.0f});
    Tensor b = make_tensor({1}, {-0.0f});
    CHECK(a.data()[0] == b.data()[0]); // numerically equal
    CHECK_FALSE(bit_equal(a, b));      // but distinct bit patterns
    CHECK(bit_equal(a, a));
    CHECK_FALSE(bit_equal(a, Tensor({2})));
}

TEST_CASE("flattened view preserves order and count") {
    Tensor t = make_tensor({2, 1, 2}, {5, 6, 7, 8});
    Tensor f = t.flattened();
    CHECK(f.rank() == 1);
    CHECK(f.dims()[0] == 4);
    CHECK(bit_equal(make_tensor({4}, {5, 6, 7, 8}), f));
}
