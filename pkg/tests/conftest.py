import pytest

from rcanav.model import (
    FormalContext,
    RelationalContext,
    RelationalContextFamily,
)

DM_TOOLS_ROWS = {
    "Astah": ["OS:Windows", "OS:Mac OS", "OS:Linux", "DM:Conceptual"],
    "Erwin DM": ["OS:Windows", "DM:Conceptual", "DM:Physical", "DM:Logical"],
    "ER/Studio": [
        "OS:Windows",
        "DM:Conceptual",
        "DM:Physical",
        "DM:Logical",
        "DM:ETL",
    ],
    "Magic Draw": [
        "OS:Windows",
        "OS:Mac OS",
        "OS:Linux",
        "DM:Conceptual",
        "DM:Physical",
        "DM:Logical",
    ],
    "MySQL Workbench": ["OS:Windows", "OS:Mac OS", "OS:Linux", "DM:Physical"],
}

DBMS_ROWS = {
    "MySQL": ["DT:Enum", "DT:Set", "DT:Geometry"],
    "Oracle": ["DT:Spatial", "DT:Audio", "DT:Image", "DT:Video", "DT:XML"],
    "PostgreSQL": ["DT:Enum", "DT:Geometry", "DT:XML", "DT:JSON"],
    "Teradata": ["DT:Enum", "DT:Geometry", "DT:XML", "DT:JSON", "DT:Period"],
}

SUPPORT_PAIRS = [
    ("Astah", "MySQL"),
    ("Astah", "Oracle"),
    ("Erwin DM", "MySQL"),
    ("Erwin DM", "Oracle"),
    ("Erwin DM", "Teradata"),
    ("ER/Studio", "MySQL"),
    ("ER/Studio", "Oracle"),
    ("ER/Studio", "PostgreSQL"),
    ("ER/Studio", "Teradata"),
    ("Magic Draw", "MySQL"),
    ("Magic Draw", "Oracle"),
    ("Magic Draw", "PostgreSQL"),
    ("MySQL Workbench", "MySQL"),
]


def build_tools_rcf() -> RelationalContextFamily:
    return RelationalContextFamily.build(
        [
            FormalContext.from_rows("DM_tools", DM_TOOLS_ROWS),
            FormalContext.from_rows("DBMS", DBMS_ROWS),
        ],
        [RelationalContext.build("support", "DM_tools", "DBMS", SUPPORT_PAIRS)],
    )


@pytest.fixture
def tools_rcf() -> RelationalContextFamily:
    return build_tools_rcf()
