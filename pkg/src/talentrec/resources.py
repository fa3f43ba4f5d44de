"""Shipped default vocabularies.

These lists are illustrative and non-canonical: they are small, hand-curated
ICT vocabularies good enough to run the pipeline on synthetic data or on a
user-supplied benchmark when no better lists are available. Every one of them
can be replaced by a file (see ``load_*`` helpers in the owning modules).
"""

FAMILY_NAMES = (
    "software engineering",
    "infrastructure and security",
    "data and AI",
    "digital experience",
    "hardware and automation",
    "technology management",
)

# Default ICT titles, grouped by family. Also used as the illustrative allow-list.
FAMILY_TITLES = {
    0: [
        "software developer",
        "ict application developer",
        "software engineer",
        "mobile application developer",
        "backend developer",
        "software architect",
        "software tester",
        "game developer",
        "computer programmer",
    ],
    1: [
        "ict help desk agent",
        "network engineer",
        "system administrator",
        "ict security specialist",
        "cloud engineer",
        "devops engineer",
        "network technician",
        "ict security administrator",
        "infrastructure architect",
    ],
    2: [
        "data scientist",
        "data analyst",
        "data engineer",
        "machine learning engineer",
        "ai engineer",
        "database administrator",
        "business intelligence analyst",
        "data architect",
        "big data developer",
    ],
    3: [
        "web developer",
        "user interface developer",
        "ux designer",
        "ui designer",
        "web designer",
        "front end developer",
        "user experience analyst",
        "interaction designer",
        "web content developer",
    ],
    4: [
        "embedded systems engineer",
        "hardware engineer",
        "automation engineer",
        "computer hardware technician",
        "electronics engineer",
        "robotics engineer",
        "firmware developer",
        "industrial automation technician",
        "iot device engineer",
    ],
    5: [
        "ict project manager",
        "it manager",
        "chief technology officer",
        "ict product manager",
        "enterprise architect",
        "technical team lead",
        "ict operations manager",
        "head of engineering",
        "scrum master",
    ],
}

DEFAULT_ALLOW_LIST = tuple(t for f in sorted(FAMILY_TITLES) for t in FAMILY_TITLES[f])

# Title keyword rules, checked in this priority order; first family with a hit wins.
# Entries containing a space are matched as phrases, others as whole tokens.
FAMILY_KEYWORDS = (
    (5, ("manager", "chief", "officer", "director", "head", "lead", "scrum", "enterprise architect")),
    (3, ("web", "ux", "ui", "designer", "interaction", "user interface", "user experience", "front end", "frontend")),
    (2, ("data", "database", "ai", "scientist", "analytics", "statistician", "machine learning", "business intelligence")),
    (1, ("network", "security", "administrator", "cloud", "devops", "infrastructure", "sysadmin", "help desk", "helpdesk", "support")),
    (4, ("hardware", "embedded", "automation", "electronics", "robotics", "firmware", "iot", "technician")),
    (0, ("developer", "programmer", "software", "engineer", "tester", "application")),
)
FALLBACK_FAMILY = 0

DIGITAL_TERMS = frozenset(
    """
    software python java javascript typescript sql nosql html css react angular api apis rest
    cloud aws azure linux unix windows network networking database databases web mobile android ios
    git docker kubernetes devops programming code coding scripting algorithm algorithms data analytics
    digital internet server servers virtualization cybersecurity security firewall encryption
    machine learning ai etl spark hadoop tableau excel erp crm saas microservices backend frontend
    firmware embedded iot plc scada automation robotics testing agile scrum ux ui
    """.split()
)

INNOVATION_TERMS = frozenset(
    ["ai", "cloud", "security", "automation", "iot", "blockchain", "robotics", "ml", "quantum", "cybersecurity"]
)

ROLE_CUES = {
    "technician": 1.0,
    "analyst": 2.0,
    "engineer": 3.0,
    "developer": 3.0,
    "architect": 4.0,
    "manager": 5.0,
}

STOP_WORDS = frozenset(
    """
    the and for with that this from into  over under your their they them our  you are was were
    will would can could should may   have has had not but all any each   more most
    other some such only  same than   also which who  what when where why how about
    """.split()
)
