#include <doctest.h>
TEST_CASE("todo test_cover") { CHECK(true); }
