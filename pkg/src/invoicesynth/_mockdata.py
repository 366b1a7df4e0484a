"""Word lists backing the offline mock generator.

Everything here is fictional; the lists only need enough variety that
distinct seeds produce distinct documents with overwhelming probability.
"""

COMPANY_STEMS = [
    "Northwind", "Apex", "Harbor", "Summit", "Cobalt", "Meridian", "Pioneer",
    "Sterling", "Cascade", "Vertex", "Orchard", "Beacon", "Granite", "Falcon",
    "Juniper", "Lakeside", "Monarch", "Redwood", "Silverline", "Trailhead",
]

COMPANY_SUFFIXES = [
    "Trading", "Logistics", "Supplies", "Industries", "Consulting", "Holdings",
    "Systems", "Partners", "Works", "Services",
]

COMPANY_LEGAL = ["Ltd.", "LLC", "Inc.", "GmbH", "Co."]

FIRST_NAMES = [
    "Avery", "Jordan", "Morgan", "Riley", "Casey", "Quinn", "Rowan", "Skyler",
    "Elliot", "Harper", "Logan", "Sawyer", "Emerson", "Finley", "Marlowe",
]

LAST_NAMES = [
    "Calloway", "Mercer", "Whitfield", "Ashford", "Lennox", "Hargrove",
    "Penrose", "Winslow", "Fairbank", "Thorne", "Kingsley", "Marchetti",
]

STREET_NAMES = [
    "Maple", "Cedar", "Willow", "Birch", "Elmwood", "Hickory", "Juniper",
    "Magnolia", "Sycamore", "Chestnut", "Larch", "Hawthorn",
]

STREET_KINDS = ["Street", "Avenue", "Lane", "Road", "Boulevard", "Drive", "Court"]

CITIES = [
    "Fairview", "Brookhaven", "Mill Creek", "Easton", "Westbrook", "Kingsport",
    "Lakewood", "Granville", "Hillsdale", "Norwood",
]

ITEM_WORDS = [
    "premium", "standard", "annual", "monthly", "bulk", "custom", "express",
    "digital", "onsite", "remote", "extended", "basic",
    "maintenance", "license", "subscription", "installation", "shipment",
    "support", "training", "assembly", "inspection", "delivery", "storage",
    "consulting", "repair", "calibration", "hosting", "printing",
]

EMAIL_DOMAINS = ["example.com", "example.org", "example.net", "mail.example.com"]

MONTH_ABBREVS = [
    "Jan", "Feb", "Mar", "Apr", "May", "Jun",
    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
]
