#include "doctest.h"
#include "zkfl/group.hpp"

using namespace zkfl;

TEST_CASE("setup_params is deterministic and seed-sensitive") {
    Bytes seed1 = to_bytes("zkfl-v1");
    Bytes seed2 = to_bytes("zkfl-v2");
    PedersenParams a = setup_params(4, seed1);
    PedersenParams b = setup_params(4, seed1);
    PedersenParams c = setup_params(4, seed2);
    CHECK(a.serialize() == b.serialize());
    CHECK(a.blinding_generator != c.blinding_generator);
    for (std::size_t i = 0; i < 4; ++i) CHECK(a.generators[i] != c.generators[i]);
    CHECK_THROWS_AS(setup_params(0, seed1), Error);
}

TEST_CASE("generators are pairwise distinct and valid") {
    PedersenParams p = setup_params(8, to_bytes("distinct"));
    CHECK(p.blinding_generator.is_valid());
    CHECK(!p.blinding_generator.is_identity());
    for (std::size_t i = 0; i < p.generators.size(); ++i) {
        CHECK(p.generators[i].is_valid());
        CHECK(p.generators[i] != p.blinding_generator);
        for (std::size_t j = i + 1; j < p.generators.size(); ++j)
            CHECK(p.generators[i] != p.generators[j]);
    }
}

TEST_CASE("commit of zero vector with zero blinding is the identity") {
    PedersenParams p = setup_params(3, to_bytes("zero"));
    std::vector<Scalar> v(3, Scalar::zero());
    CHECK(commit_vector(p, v, Scalar::zero()).point.is_identity());
}

TEST_CASE("commitment matches a repeated-addition oracle") {
    PedersenParams p = setup_params(2, to_bytes("oracle"));
    std::vector<Scalar> v = {Scalar::from_u64(1), Scalar::from_u64(2)};
    Commitment c = commit_vector(p, v, Scalar::from_u64(3));

    GroupElement expected = p.generators[0];
    expected = expected.add(p.generators[1]).add(p.generators[1]);
    expected = expected.add(p.blinding_generator).add(p.blinding_generator).add(p.blinding_generator);
    CHECK(c.point == expected);
}

TEST_CASE("commitments are additively homomorphic") {
    PedersenParams p = setup_params(4, to_bytes("homo"));
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Scalar> v(4), w(4), sum(4);
        for (int i = 0; i < 4; ++i) {
            v[i] = Scalar::from_u64(rng.next_u64() % 1000);
            w[i] = Scalar::from_u64(rng.next_u64() % 1000);
            sum[i] = v[i].add(w[i]);
        }
        Scalar r = rng.next_scalar();
        Scalar s = rng.next_scalar();
        Commitment cv = commit_vector(p, v, r);
        Commitment cw = commit_vector(p, w, s);
        CHECK(cv.point.add(cw.point) == commit_vector(p, sum, r.add(s)).point);
    }
}

TEST_CASE("verify_opening accepts the opening and rejects every perturbation") {
    PedersenParams p = setup_params(4, to_bytes("open"));
    Rng rng(11);
    std::vector<Scalar> v(4);
    for (auto& s : v) s = Scalar::from_u64(rng.next_u64() % 100000);
    Scalar r = rng.next_scalar();
    Commitment c = commit_vector(p, v, r);

    CHECK(verify_opening(p, c, v, r));
    CHECK(!verify_opening(p, c, v, r.add(Scalar::one())));
    for (int i = 0; i < 4; ++i) {
        std::vector<Scalar> bad = v;
        bad[i] = bad[i].add(Scalar::one());
        CHECK(!verify_opening(p, c, bad, r));
    }
}

TEST_CASE("commit rejects dimension mismatch") {
    PedersenParams p = setup_params(2, to_bytes("dim"));
    std::vector<Scalar> v(3, Scalar::one());
    CHECK_THROWS_AS(commit_vector(p, v, Scalar::zero()), Error);
}

TEST_CASE("scalar arithmetic matches small-integer arithmetic") {
    CHECK(Scalar::from_u64(3).mul(Scalar::from_u64(5)) == Scalar::from_u64(15));
    CHECK(Scalar::from_u64(7).add(Scalar::from_u64(8)) == Scalar::from_u64(15));
    CHECK(Scalar::from_u64(15).sub(Scalar::from_u64(8)) == Scalar::from_u64(7));
    CHECK(Scalar::from_u64(9).negate().add(Scalar::from_u64(9)).is_zero());
    CHECK(Scalar::zero().is_zero());
    CHECK(!Scalar::one().is_zero());
}

TEST_CASE("schnorr signatures verify and fail closed") {
    Rng rng(3);
    KeyPair keys = keygen(rng);
    KeyPair other = keygen(rng);
    Bytes msg = to_bytes("round 7 statement");

    Signature sig = sign(keys.secret, msg);
    CHECK(verify_sig(keys.public_key, msg, sig));

    Bytes flipped = msg;
    flipped[0] ^= 1;
    CHECK(!verify_sig(keys.public_key, flipped, sig));
    CHECK(!verify_sig(other.public_key, msg, sig));
    CHECK(!verify_sig(keys.public_key, msg, sig, domain::kAttest));
}

TEST_CASE("hash_commit separates payload, nonce, and domain") {
    Bytes ab = to_bytes("ab"), a = to_bytes("a"), c = to_bytes("c"), bc = to_bytes("bc");
    CHECK(hash_commit(ab, c, domain::kCommitAnchor) == hash_commit(ab, c, domain::kCommitAnchor));
    CHECK(hash_commit(ab, c, domain::kCommitAnchor) != hash_commit(ab, bc, domain::kCommitAnchor));
    CHECK(hash_commit(ab, c, domain::kCommitAnchor) != hash_commit(a, bc, domain::kCommitAnchor));
    CHECK(hash_commit(ab, c, domain::kCommitAnchor) != hash_commit(ab, c, domain::kStatement));
    CHECK_THROWS_AS(hash_commit(ab, c, ""), Error);
}

TEST_CASE("rng streams are deterministic and forks are independent") {
    Rng a(99), b(99);
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.next_scalar() == b.next_scalar());

    Rng base(5);
    Rng f1 = base.fork("left");
    Rng f2 = base.fork("right");
    CHECK(f1.next_u64() != f2.next_u64());

    Rng c(5);
    Rng f1_again = c.fork("left");
    Rng r1(5), r2(5);
    CHECK(r1.fork("left").next_u64() == r2.fork("left").next_u64());
    (void)f1_again;
}

TEST_CASE("signature serialization round-trips at 64 bytes") {
    Rng rng(17);
    KeyPair keys = keygen(rng);
    Signature sig = sign(keys.secret, to_bytes("x"));
    Bytes wire = sig.serialize();
    CHECK(wire.size() == 64);
    CHECK(Signature::deserialize(wire) == sig);
}
