"""Archive-integrated DOI service.

Mints persistent identifiers over archive observations, serves fixed
identifiers for curated products, resolves them to landing pages, and
reports on journal-submission compliance and link survival.
"""

__version__ = "0.1.0"
