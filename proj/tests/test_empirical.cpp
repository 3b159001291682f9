#include <doctest.h>
TEST_CASE("todo test_empirical") { CHECK(true); }
