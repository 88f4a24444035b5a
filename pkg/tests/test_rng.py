from chialvo.rng import MASK64, Xoshiro256StarStar, _splitmix64


# Reference outputs for splitmix64 from state 0 and for xoshiro256**
# seeded through it, cross-checked against independent implementations.
SPLITMIX_SEQ = (0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F)
XOSHIRO_SEQ = (0x99EC5F36CB75F2B4, 0xBF6E1F784956452A,
               0x1A5F849D4933E6E0, 0x6AA594F1262D2D2C)


def test_splitmix64_reference_sequence():
    s = 0
    for expected in SPLITMIX_SEQ:
        s, z = _splitmix64(s)
        assert z == expected


def test_xoshiro_reference_sequence():
    rng = Xoshiro256StarStar(0)
    assert tuple(rng.next_u64() for _ in range(4)) == XOSHIRO_SEQ


def test_same_seed_same_stream():
    a = Xoshiro256StarStar(12345)
    b = Xoshiro256StarStar(12345)
    assert [a.next_u64() for _ in range(50)] == [b.next_u64() for _ in range(50)]


def test_different_seeds_differ():
    a = Xoshiro256StarStar(1)
    b = Xoshiro256StarStar(2)
    assert [a.next_u64() for _ in range(10)] != [b.next_u64() for _ in range(10)]


def test_seed_is_masked_to_64_bits():
    a = Xoshiro256StarStar(7)
    b = Xoshiro256StarStar(7 + (1 << 64))
    assert a.next_u64() == b.next_u64()


def test_random_unit_interval_granularity():
    rng = Xoshiro256StarStar(99)
    for _ in range(1000):
        v = rng.random()
        assert 0.0 <= v < 1.0
        # 53-bit convention: every draw is an integer multiple of 2**-53
        assert float(v * (1 << 53)).is_integer()


def test_uniform_range_and_count():
    rng = Xoshiro256StarStar(5)
    vals = rng.uniform(-0.1, 0.1, 500)
    assert len(vals) == 500
    assert all(-0.1 <= v < 0.1 for v in vals)
    # draws should actually fill the range, not cluster at one end
    assert min(vals) < -0.08 and max(vals) > 0.08
