#include <doctest.h>
TEST_CASE("todo test_partition") { CHECK(true); }
