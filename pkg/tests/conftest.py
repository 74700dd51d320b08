#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import pytest

# Import src

from netmigrate.fixture import fixture_document, fixture_motivating_example


@pytest.fixture
def example():
    """
    The motivating example as (Topology, PolicySet).
    """
    return fixture_motivating_example()


@pytest.fixture
def topology(example):
    return example[0]


@pytest.fixture
def policy_set(example):
    return example[1]


@pytest.fixture
def document() -> dict:
    return fixture_document()
