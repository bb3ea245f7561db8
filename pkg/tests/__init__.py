# Tests for NICO operator
