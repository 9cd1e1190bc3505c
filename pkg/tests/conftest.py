import pytest

from attrmdd import builtin_table, make_layout


@pytest.fixture(scope="session")
def table():
    return builtin_table()


@pytest.fixture(scope="session")
def layout(table):
    return make_layout(table.attribute_order)
