import pytest

from codewords.codes import builtin_code


@pytest.fixture(scope="session")
def repetition3():
    return builtin_code("repetition3")


@pytest.fixture(scope="session")
def perfect5():
    return builtin_code("perfect5")


@pytest.fixture(scope="session")
def steane7():
    return builtin_code("steane7")


@pytest.fixture(scope="session")
def all_codes(repetition3, perfect5, steane7):
    return (repetition3, perfect5, steane7)
