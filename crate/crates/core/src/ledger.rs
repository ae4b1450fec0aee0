//! Per-token account books.
//!
//! A [`Ledger`] is a value: every operation returns a new snapshot and leaves
//! the receiver untouched, so a failed operation can never leave a partial
//! update behind.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::types::{AccountId, Amount, TokenId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LedgerError {
    #[error("{account} holds {available} {token}, needs {needed}")]
    InsufficientBalance {
        token: TokenId,
        account: AccountId,
        needed: f64,
        available: f64,
    },
    #[error("invalid amount {0}")]
    InvalidAmount(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ledger {
    token: TokenId,
    balances: BTreeMap<AccountId, Amount>,
    total_supply: Amount,
}

impl Ledger {
    pub fn new(token: TokenId) -> Self {
        Ledger { token, balances: BTreeMap::new(), total_supply: Amount::ZERO }
    }

    pub fn token(&self) -> &TokenId {
        &self.token
    }

    pub fn total_supply(&self) -> Amount {
        self.total_supply
    }

    pub fn balance(&self, account: &AccountId) -> Amount {
        self.balances.get(account).copied().unwrap_or(Amount::ZERO)
    }

    pub fn accounts(&self) -> impl Iterator<Item = (&AccountId, Amount)> {
        self.balances.iter().map(|(a, b)| (a, *b))
    }

    /// Sum of all balances; equals `total_supply` up to rounding.
    pub fn balance_sum(&self) -> f64 {
        self.balances.values().map(|b| b.value()).sum()
    }

    pub fn transfer(&self, from: &AccountId, to: &AccountId, amount: Amount) -> Result<Ledger, LedgerError> {
        let mut next = self.clone();
        next.transfer_in_place(from, to, amount)?;
        Ok(next)
    }

    pub fn mint(&self, to: &AccountId, amount: Amount) -> Result<Ledger, LedgerError> {
        let mut next = self.clone();
        next.mint_in_place(to, amount);
        Ok(next)
    }

    pub fn burn(&self, from: &AccountId, amount: Amount) -> Result<Ledger, LedgerError> {
        let mut next = self.clone();
        next.burn_in_place(from, amount)?;
        Ok(next)
    }

    fn debit(&mut self, account: &AccountId, amount: Amount) -> Result<(), LedgerError> {
        let have = self.balance(account);
        let left = have.checked_sub(amount).map_err(|_| LedgerError::InsufficientBalance {
            token: self.token.clone(),
            account: account.clone(),
            needed: amount.value(),
            available: have.value(),
        })?;
        self.balances.insert(account.clone(), left);
        Ok(())
    }

    fn credit(&mut self, account: &AccountId, amount: Amount) {
        let have = self.balance(account);
        self.balances.insert(account.clone(), have + amount);
    }

    pub(crate) fn transfer_in_place(
        &mut self,
        from: &AccountId,
        to: &AccountId,
        amount: Amount,
    ) -> Result<(), LedgerError> {
        if from == to && self.balance(from) >= amount {
            return Ok(());
        }
        if amount.is_zero() {
            return Ok(());
        }
        self.debit(from, amount)?;
        self.credit(to, amount);
        Ok(())
    }

    pub(crate) fn mint_in_place(&mut self, to: &AccountId, amount: Amount) {
        if amount.is_zero() {
            return;
        }
        self.credit(to, amount);
        self.total_supply = self.total_supply + amount;
    }

    pub(crate) fn burn_in_place(&mut self, from: &AccountId, amount: Amount) -> Result<(), LedgerError> {
        if amount.is_zero() {
            return Ok(());
        }
        self.debit(from, amount)?;
        // the sum of balances bounds the supply from below; rounding may leave
        // the supply a hair under the burned amount on a full burn
        self.total_supply = Amount::new((self.total_supply.value() - amount.value()).max(0.0))
            .expect("non-negative by construction");
        Ok(())
    }
}

/// Registry of ledgers keyed by token.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ledgers {
    books: BTreeMap<TokenId, Ledger>,
}

impl Ledgers {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, token: &TokenId) -> Option<&Ledger> {
        self.books.get(token)
    }

    pub fn balance(&self, token: &TokenId, account: &AccountId) -> Amount {
        self.books.get(token).map(|l| l.balance(account)).unwrap_or(Amount::ZERO)
    }

    pub fn tokens(&self) -> impl Iterator<Item = &TokenId> {
        self.books.keys()
    }

    pub fn ledgers(&self) -> impl Iterator<Item = &Ledger> {
        self.books.values()
    }

    fn book_mut(&mut self, token: &TokenId) -> &mut Ledger {
        self.books.entry(token.clone()).or_insert_with(|| Ledger::new(token.clone()))
    }

    pub fn transfer(
        &mut self,
        token: &TokenId,
        from: &AccountId,
        to: &AccountId,
        amount: Amount,
    ) -> Result<(), LedgerError> {
        self.book_mut(token).transfer_in_place(from, to, amount)
    }

    pub fn mint(&mut self, token: &TokenId, to: &AccountId, amount: Amount) {
        self.book_mut(token).mint_in_place(to, amount)
    }

    pub fn burn(&mut self, token: &TokenId, from: &AccountId, amount: Amount) -> Result<(), LedgerError> {
        self.book_mut(token).burn_in_place(from, amount)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::rel_eq;
    use proptest::prelude::*;

    fn amt(v: f64) -> Amount {
        Amount::new(v).unwrap()
    }

    fn weth_book() -> Ledger {
        let l = Ledger::new(TokenId::new("WETH"));
        let l = l.mint(&"trader".into(), amt(1.0)).unwrap();
        l.mint(&"pool".into(), amt(10.0)).unwrap()
    }

    #[test]
    fn transfer_moves_balance() {
        let l = weth_book().transfer(&"trader".into(), &"pool".into(), amt(1.0)).unwrap();
        assert_eq!(l.balance(&"trader".into()).value(), 0.0);
        assert_eq!(l.balance(&"pool".into()).value(), 11.0);
        assert_eq!(l.total_supply().value(), 11.0);
    }

    #[test]
    fn zero_transfer_is_noop() {
        let l = weth_book();
        assert_eq!(l.transfer(&"pool".into(), &"nobody".into(), Amount::ZERO).unwrap(), l);
    }

    #[test]
    fn insufficient_transfer_is_rejected() {
        let l = weth_book();
        let err = l.transfer(&"trader".into(), &"pool".into(), amt(5.0)).unwrap_err();
        assert!(matches!(err, LedgerError::InsufficientBalance { .. }));
        assert_eq!(l, weth_book());
    }

    #[test]
    fn mint_and_burn_adjust_supply() {
        let l = Ledger::new(TokenId::new("X")).mint(&"a".into(), amt(10.0)).unwrap();
        assert_eq!(l.balance(&"a".into()).value(), 10.0);
        assert_eq!(l.total_supply().value(), 10.0);
        let l = l.burn(&"a".into(), amt(10.0)).unwrap();
        assert_eq!(l.balance(&"a".into()).value(), 0.0);
        assert_eq!(l.total_supply().value(), 0.0);
        let same = l.mint(&"a".into(), Amount::ZERO).unwrap();
        assert_eq!(same, l);
        assert!(l.burn(&"a".into(), amt(1.0)).is_err());
    }

    #[derive(Debug, Clone)]
    enum Op {
        Transfer(usize, usize, f64),
        Mint(usize, f64),
        Burn(usize, f64),
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            (0..4usize, 0..4usize, 0.0..50.0f64).prop_map(|(a, b, v)| Op::Transfer(a, b, v)),
            (0..4usize, 0.0..50.0f64).prop_map(|(a, v)| Op::Mint(a, v)),
            (0..4usize, 0.0..50.0f64).prop_map(|(a, v)| Op::Burn(a, v)),
        ]
    }

    proptest! {
        #[test]
        fn supply_matches_balances(ops in proptest::collection::vec(op(), 1..60)) {
            let ids: Vec<AccountId> = (0..4).map(|i| AccountId::new(format!("acct{i}"))).collect();
            let mut l = Ledger::new(TokenId::new("T"));
            for o in ops {
                let before = l.clone();
                let res = match o {
                    Op::Transfer(a, b, v) => l.transfer(&ids[a], &ids[b], amt(v)),
                    Op::Mint(a, v) => l.mint(&ids[a], amt(v)),
                    Op::Burn(a, v) => l.burn(&ids[a], amt(v)),
                };
                match res {
                    Ok(next) => {
                        if let Op::Transfer(..) = o {
                            prop_assert_eq!(next.total_supply(), before.total_supply());
                        }
                        l = next;
                    }
                    Err(_) => prop_assert_eq!(&l, &before),
                }
                prop_assert!(rel_eq(l.balance_sum(), l.total_supply().value(), 1e-9));
            }
        }
    }
}
