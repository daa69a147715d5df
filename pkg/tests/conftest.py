import pytest

from plf import load_system

HILBERT_PLS = """\
# classical implicational fragment, Hilbert style
kind wff
var ph ps ch p q r : wff
rule imp : wff ::= "(" wff "->" wff ")"
axiom A1 : => "( ph -> ( ps -> ph ) )"
axiom A2 : => "( ( ph -> ( ps -> ch ) ) -> ( ( ph -> ps ) -> ( ph -> ch ) ) )"
axiom MP : "ph" "( ph -> ps )" => "ps"
statement id : => "( p -> p )"
"""


@pytest.fixture(scope="session")
def hilbert():
    return load_system(HILBERT_PLS)


@pytest.fixture()
def hilbert_path(tmp_path):
    path = tmp_path / "hilbert.pls"
    path.write_text(HILBERT_PLS)
    return path
