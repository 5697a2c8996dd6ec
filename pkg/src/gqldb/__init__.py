"""Embeddable graph database: a GQL dialect over an append-only log.

Typical use::

    from gqldb import Database

    db = Database("social.gqldb")
    db.run("create schema /yc; create graph /yc/g ANY;"
           "insert (:Person{name:'Jay'});")
    [table] = db.run("match (p:Person) return p.name")
"""

from .engine import BindingTable, Database, Session, Transaction
from .errors import GqlError
from .parser import parse_script, parse_statement
from .remote import RemoteSession, ServerConfig, remote_execute, serve

__all__ = [
    "BindingTable",
    "Database",
    "GqlError",
    "RemoteSession",
    "ServerConfig",
    "Session",
    "Transaction",
    "parse_script",
    "parse_statement",
    "remote_execute",
    "serve",
]
